#include "scatterlab/phases.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

using namespace scatterlab;

namespace {
constexpr double pi = std::numbers::pi;

// Two-site matching solved directly: phi(r) = e^{i p2 r} + R e^{-i p2 r} on r >= 1,
// phi(0) = 0, potential V at r = 1, hopping 2 cos(p1/2). Long double throughout.
std::complex<long double> matching_R(long double k1, long double k2, long double V) {
    using C = std::complex<long double>;
    const long double p1 = -(k1 + k2), p2 = (k2 - k1) / 2;
    const long double c = std::cos(p1 / 2);
    const C e(std::cos(p2), std::sin(p2));
    return -(C(2 * c) + V * e) / (C(2 * c) + V * std::conj(e));
}

const auto head_on = RelativeKinematics::head_on(pi / 4, pi / 2);
}  // namespace

TEST_CASE("kinematics") {
    CHECK(head_on.k1().value() == Catch::Approx(pi / 4));
    CHECK(head_on.k2().value() == Catch::Approx(-pi / 2));
    CHECK(head_on.p1() == Catch::Approx(pi / 4));
    CHECK(head_on.p2() == Catch::Approx(-3 * pi / 8));
    CHECK(head_on.approaching());
    CHECK_FALSE(RelativeKinematics(pi / 4, pi / 2).approaching());
    CHECK_THROWS_AS(RelativeKinematics(pi / 2, pi / 2), ConfigError);  // cos(p1/2) = 0
}

TEST_CASE("t-J reflection limits") {
    for (double k1 : {0.3, pi / 4, 1.1})
        for (double k2 : {-0.4, -pi / 2, 2.5}) {
            RelativeKinematics kin(k1, k2);
            auto a = tj_reflection(kin, 0.0);
            CHECK(std::abs(a.R - cplx(-1.0)) < 1e-15);
            CHECK(a.T == cplx(0.0));
            auto big = tj_reflection(kin, 1e9);
            CHECK(std::abs(big.R + std::exp(cplx(0, 2 * kin.p2()))) < 1e-8);
        }
    CHECK(gate_g(Model::TJ, head_on, 0.0).distance(PhaseGate::from_phases(0, 0, pi, 0)) < 1e-15);
}

TEST_CASE("t-J reflection against the matching-equation oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> kd(-pi, pi), jd(-6.0, 6.0);
    int n = 0;
    while (n < 200) {
        const double k1 = kd(rng), k2 = kd(rng), J = jd(rng);
        if (std::abs(std::cos((k1 + k2) / 2)) < 1e-3) continue;
        RelativeKinematics kin(k1, k2);
        const auto R = tj_reflection(kin, J).R;
        const auto ref = matching_R(k1, k2, -J);
        CHECK(std::abs(R - cplx(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))) < 1e-12);
        CHECK(std::abs(std::abs(R) - 1.0) < 1e-12);
        ++n;
    }
}

TEST_CASE("t-J phases for the head-on pi/4, pi/2 collision") {
    // Values from a 30-digit evaluation of the matching equation.
    CHECK(std::arg(tj_reflection(head_on, 1.0).R) == Catch::Approx(-2.016357580738223).margin(1e-13));
    CHECK(std::arg(tj_reflection(head_on, 2.0).R) == Catch::Approx(-1.059805579497853).margin(1e-13));
    CHECK(std::arg(tj_reflection(head_on, 4.0).R) == Catch::Approx(-0.171153837842922).margin(1e-13));
    // Literal (pi/4, pi/2) kinematics, where the packets do not approach each other.
    RelativeKinematics lit(pi / 4, pi / 2);
    CHECK(std::arg(tj_reflection(lit, 2.0).R) == Catch::Approx(-1.910633236249019).margin(1e-13));
}

TEST_CASE("singular denominators are reported") {
    // k1 = k2 gives p2 = 0; J = 2 cos(p1/2) then zeroes the denominator.
    RelativeKinematics same(0.5, 0.5);
    CHECK_THROWS_AS(tj_reflection(same, 2.0 * std::cos(0.5)), SingularSystemError);
    CHECK_THROWS_AS(hubbard_phase(same, 0.0), SingularSystemError);
}

TEST_CASE("Hubbard closed form") {
    for (double k1 : {0.3, pi / 4})
        for (double k2 : {-0.9, -pi / 2}) {
            RelativeKinematics kin(k1, k2);
            CHECK(std::abs(hubbard_phase(kin, 0.0) - cplx(1.0)) < 1e-15);
            CHECK(std::abs(hubbard_phase(kin, 1e10) + cplx(1.0)) < 1e-9);
        }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> kd(-pi, pi), ud(-20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double k1 = kd(rng), k2 = kd(rng);
        if (std::abs(std::cos((k1 + k2) / 2)) < 1e-3 || std::abs(std::sin((k2 - k1) / 2)) < 1e-3) continue;
        RelativeKinematics kin(k1, k2);
        const double U = ud(rng);
        CHECK(std::abs(std::abs(hubbard_phase(kin, U)) - 1.0) < 1e-12);
        const double t2 = hubbard_transmission_probability(kin, U);
        CHECK((t2 >= 0.0 && t2 <= 1.0));
    }
    CHECK(gate_g(Model::Hubbard, head_on, 0.0).distance(PhaseGate::identity()) < 1e-15);
    CHECK(std::arg(hubbard_phase(head_on, 2.0)) == Catch::Approx(-1.059805579497853).margin(1e-13));
}

TEST_CASE("gate g structure") {
    auto g = gate_g(Model::TJ, head_on, 2.0);
    CHECK(g.unimodularity_error() < 1e-14);
    CHECK(g.diag[spin::TPlus] == cplx(1.0));
    CHECK(g.diag[spin::T0] == cplx(1.0));
    CHECK(g.diag[spin::TMinus] == cplx(1.0));
    auto G = g * g;
    CHECK(std::abs(G.diag[spin::S] - std::exp(cplx(0, 2 * g.singlet_phase()))) < 1e-14);
    CHECK(gate_power(g, 2).distance(G) < 1e-14);
    CHECK(gate_power(g, 0).distance(PhaseGate::identity()) == 0.0);

    // In the uncoupled basis: unitary, identity on the triplets.
    auto u = g.uncoupled_matrix();
    CHECK((u.adjoint() * u - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd t0(0, r, r, 0), s(0, r, -r, 0), tp(1, 0, 0, 0);
    CHECK((u * t0 - t0).norm() < 1e-14);
    CHECK((u * tp - tp).norm() < 1e-14);
    CHECK((u * s - g.diag[spin::S] * s).norm() < 1e-14);
}

TEST_CASE("XXZ gate") {
    // No spin interaction: only the hard core, which flips the symmetric channel.
    auto hc = gate_g_xxz(head_on, 0.0, 0.0);
    CHECK(hc.gate.distance(PhaseGate::from_phases(0, 0, pi, 0)) < 1e-14);
    CHECK(std::abs(hc.global_phase) < 1e-14);

    // Isotropic: T0 sees the same potential as T+-, so theta1 = 0.
    auto iso = gate_g_xxz(head_on, 1.0, 1.0);
    CHECK(std::abs(iso.theta1) < 1e-14);
    CHECK(iso.theta2 == Catch::Approx(-2.069369198594918).margin(1e-13));
    CHECK(iso.global_phase == Catch::Approx(-0.236583331196639).margin(1e-13));

    auto an = gate_g_xxz(head_on, 2.0, 0.5);
    CHECK(an.theta1 == Catch::Approx(-0.587733505251514).margin(1e-13));
    CHECK(an.theta2 == Catch::Approx(-1.754349313636457).margin(1e-13));
    CHECK(an.gate.unimodularity_error() < 1e-14);
    CHECK(an.gate.diag[spin::TPlus] == cplx(1.0));
}

TEST_CASE("phase curves") {
    auto tj0 = phase_curve(Model::TJ, head_on, {0.0});
    CHECK(tj0[0].theta == Catch::Approx(pi));
    auto hu0 = phase_curve(Model::Hubbard, head_on, {0.0});
    CHECK(hu0[0].theta == Catch::Approx(0.0).margin(1e-15));

    // theta(J) on (0, 8]: the unwrapped branch rises monotonically from pi for this kinematics.
    auto grid = parse_grid("0:8:801");
    CHECK(grid.size() == 801);
    auto rows = phase_curve(Model::TJ, head_on, grid);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].theta_unwrapped > rows[i - 1].theta_unwrapped);
        CHECK(std::abs(rows[i].theta_unwrapped - rows[i - 1].theta_unwrapped) < 0.5);
    }
    // Bounded by the J -> infinity value Arg(-e^{2ip2}) = pi + 2 p2, taken on the same branch.
    CHECK(rows.back().theta_unwrapped < 3 * pi + 2 * head_on.p2());

    // A singular grid point is flagged and skipped.
    RelativeKinematics same(0.5, 0.5);
    const double js = 2.0 * std::cos(0.5);
    auto srows = phase_curve(Model::TJ, same, {0.0, js, 3.0});
    CHECK_FALSE(srows[0].singular);
    CHECK(srows[1].singular);
    CHECK_FALSE(srows[2].singular);

    auto xrows = phase_curve(Model::XXZ, head_on, {0.0, 1.0}, {XxzSweep::Jz, 1.0});
    CHECK(std::abs(xrows[1].theta1) < 1e-14);  // Jx = Jz = 1

    CHECK_THROWS_AS(phase_curve(Model::TJ, head_on, {}), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:8"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:8:0"), ConfigError);
    CHECK_THROWS_AS(parse_grid("a:8:3"), ConfigError);
    CHECK(parse_grid("1:1:1") == std::vector<double>{1.0});
}
