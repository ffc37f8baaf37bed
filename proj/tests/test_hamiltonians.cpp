#include "scatterlab/hamiltonians.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <numbers>
#include <random>

using namespace scatterlab;

namespace {

Eigen::MatrixXd dense(const CsrMatrix& m) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(m.dim()));
    for (std::size_t r = 0; r < m.dim(); ++r)
        m.for_each_in_row(r, [&](std::size_t c, double v) { d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v; });
    return d;
}

std::vector<double> spectrum(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<std::pair<int, int>> int_edges(const ScatterGraph& g) {
    std::vector<std::pair<int, int>> e;
    for (auto [u, v] : g.edges()) e.emplace_back(static_cast<int>(u), static_cast<int>(v));
    return e;
}

ScatterGraph test_graph() {
    // Triangle with a tail and a chord: odd cycles and degree-3 vertices.
    return ScatterGraph(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {1, 3}}, {0, 4});
}

}  // namespace

TEST_CASE("one-particle Hamiltonian") {
    auto h = one_particle_h(build_path(2), 1.0);
    CHECK(h.dimension == 2);
    CHECK(h.basis_tag == BasisTag::OneParticle);
    CHECK(h.entries.at(0, 1) == -1.0);
    CHECK(h.entries.at(1, 0) == -1.0);
    CHECK(h.entries.at(0, 0) == 0.0);

    CHECK(one_particle_h(build_path(4), 0.0).entries.nnz() == 0);

    for (std::size_t n : {3, 6, 9}) {
        const auto ev = spectrum(dense(one_particle_h(build_path(n), 1.3).entries));
        std::vector<double> expect;
        for (std::size_t j = 1; j <= n; ++j)
            expect.push_back(-2.0 * 1.3 * std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n + 1)));
        std::sort(expect.begin(), expect.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(ev[i] == Catch::Approx(expect[i]).margin(1e-12));
    }
}

TEST_CASE("t-J dimer: hard-core basis and singlet energy") {
    const double J = 0.7;
    auto h = two_particle_h(build_path(2), ModelParams::tj(J));
    // One spatial configuration {0,1} times four spin states; double occupancy excluded.
    CHECK(h.dimension == 4);
    CHECK(h.basis_tag == BasisTag::TwoParticleTJ);
    const auto ev = spectrum(dense(h.entries));
    CHECK(ev[0] == Catch::Approx(-J).margin(1e-14));
    for (int i = 1; i < 4; ++i) CHECK(ev[i] == Catch::Approx(0.0).margin(1e-14));

    TwoParticleBasis basis(2, true);
    for (const auto& s : basis.states()) CHECK_FALSE(s.same_site());
}

TEST_CASE("Hubbard dimer spectrum") {
    for (double U : {0.0, 1.0, 3.5, 10.0}) {
        const double t = 1.0;
        auto h = two_particle_h(build_path(2), ModelParams::hubbard(U, t));
        CHECK(h.dimension == 6);
        auto ev = spectrum(dense(h.entries));
        const double r = std::sqrt(U * U + 16 * t * t);
        std::vector<double> expect{0, 0, 0, U, 0.5 * (U + r), 0.5 * (U - r)};
        std::sort(expect.begin(), expect.end());
        for (int i = 0; i < 6; ++i) CHECK(ev[static_cast<std::size_t>(i)] == Catch::Approx(expect[static_cast<std::size_t>(i)]).margin(1e-10));
    }
}

TEST_CASE("Hubbard dimer singlet gap approaches 4t^2/U") {
    const double t = 1.0, U = 100.0;
    const auto ev = spectrum(dense(two_particle_h(build_path(2), ModelParams::hubbard(U, t)).entries));
    const double gap = 0.0 - ev[0];  // triplets sit at 0
    const double J = ModelParams::hubbard(U, t).J_from_U();
    CHECK(std::abs(gap - J) / J < 0.05);
    CHECK_THROWS_AS(ModelParams::hubbard(0.0).J_from_U(), ConfigError);
}

TEST_CASE("matrix elements agree with a Jordan-Wigner Fock-space oracle") {
    const auto g = test_graph();
    const auto edges = int_edges(g);
    struct Case {
        ModelParams p;
        double U, J, Jx, Jz;
    };
    const std::vector<Case> cases{
        {ModelParams::tj(1.3, 0.8), 0, 1.3, 0, 0},
        {ModelParams::hubbard(2.2, 0.8), 2.2, 0, 0, 0},
        {ModelParams::xxz(0.9, -0.4, 0.8), 0, 0, 0.9, -0.4},
    };
    for (const auto& c : cases) {
        auto h = dense(two_particle_h(g, c.p).entries);
        oracle::Fock2 f(5, c.p.hard_core());
        auto ref = oracle::fock_hamiltonian(f, edges, 0.8, c.U, c.J, c.Jx, c.Jz);
        REQUIRE(h.rows() == ref.rows());
        CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("symmetry sectors and hermiticity") {
    const auto g = test_graph();
    for (const auto& p : {ModelParams::tj(1.1), ModelParams::hubbard(3.0), ModelParams::xxz(1.2, 0.5)}) {
        TwoParticleBasis basis(g.vertex_count(), p.hard_core());
        auto h = two_particle_h(g, p, basis);
        CHECK(h.entries.asymmetry() == 0.0);
        auto H = dense(h.entries);
        auto Sz = dense(total_sz(basis));
        auto S2 = dense(total_spin_squared(basis));
        CHECK((H * Sz - Sz * H).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((H * S2 - S2 * H).cwiseAbs().maxCoeff() < 1e-12);
        // S^2 eigenvalues are s(s+1) with s in {0, 1}
        for (double e : spectrum(S2)) CHECK((std::abs(e) < 1e-12 || std::abs(e - 2.0) < 1e-12));
    }
}

TEST_CASE("Sz-restricted basis is a block of the full Hamiltonian") {
    const auto g = test_graph();
    const auto p = ModelParams::tj(0.9);
    TwoParticleBasis full(g.vertex_count(), true);
    TwoParticleBasis sector(g.vertex_count(), true, 0);
    auto hf = two_particle_h(g, p, full);
    auto hs = two_particle_h(g, p, sector);
    CHECK(sector.size() == 5 * 4);  // N(N-1) states with one up and one down
    for (std::size_t i = 0; i < sector.size(); ++i)
        for (std::size_t j = 0; j < sector.size(); ++j) {
            const auto a = sector.state(i), b = sector.state(j);
            const auto fi = static_cast<std::size_t>(full.index_of_modes(a.m1, a.m2));
            const auto fj = static_cast<std::size_t>(full.index_of_modes(b.m1, b.m2));
            CHECK(hs.entries.at(i, j) == hf.entries.at(fi, fj));
        }
}

TEST_CASE("U = 0 and J = 0 reduce to antisymmetrized free hopping") {
    const auto g = test_graph();
    TwoParticleBasis basis(g.vertex_count(), false);
    auto h2 = dense(two_particle_h(g, ModelParams::hubbard(0.0), basis).entries);
    // Two free fermions: eigenvalues are sums e_a + e_b over distinct single-particle modes.
    auto e1 = spectrum(dense(one_particle_h(g, 1.0).entries));
    std::vector<double> modes;
    for (double e : e1) modes.insert(modes.end(), {e, e});
    std::vector<double> sums;
    for (std::size_t a = 0; a < modes.size(); ++a)
        for (std::size_t b = a + 1; b < modes.size(); ++b) sums.push_back(modes[a] + modes[b]);
    std::sort(sums.begin(), sums.end());
    auto ev = spectrum(h2);
    REQUIRE(ev.size() == sums.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == Catch::Approx(sums[i]).margin(1e-12));

    // J = 0 t-J equals the U = 0 Hamiltonian restricted to singly occupied states.
    TwoParticleBasis hc(g.vertex_count(), true);
    auto htj = two_particle_h(g, ModelParams::tj(0.0), hc);
    for (std::size_t i = 0; i < hc.size(); ++i)
        for (std::size_t j = 0; j < hc.size(); ++j) {
            const auto a = hc.state(i), b = hc.state(j);
            CHECK(htj.entries.at(i, j) ==
                  h2(basis.index_of_modes(a.m1, a.m2), basis.index_of_modes(b.m1, b.m2)));
        }
}

TEST_CASE("model/basis mismatch is rejected") {
    TwoParticleBasis full(3, false);
    CHECK_THROWS_AS(two_particle_h(build_path(3), ModelParams::tj(1.0), full), ConfigError);
    CHECK_THROWS_AS(model_from_string("heisenberg"), ConfigError);
}

TEST_CASE("coupled/uncoupled spin basis") {
    SpinHalfPairState ud;
    ud.amplitudes[spin::UD] = 1.0;
    auto c = coupled_uncoupled(ud, SpinBasis::Coupled);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(c.amplitudes[spin::T0] - r) < 1e-15);
    CHECK(std::abs(c.amplitudes[spin::S] - r) < 1e-15);
    CHECK(std::abs(c.amplitudes[spin::TPlus]) == 0.0);

    SpinHalfPairState tp;
    tp.basis = SpinBasis::Coupled;
    tp.amplitudes[spin::TPlus] = 1.0;
    auto u = coupled_uncoupled(tp, SpinBasis::Uncoupled);
    CHECK(u.amplitudes[spin::UU] == cplx(1.0));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        SpinHalfPairState s;
        for (auto& a : s.amplitudes) a = {nd(rng), nd(rng)};
        auto back = coupled_uncoupled(coupled_uncoupled(s, SpinBasis::Coupled), SpinBasis::Uncoupled);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(back.amplitudes[i] - s.amplitudes[i]) < 1e-15);
        CHECK(std::abs(coupled_uncoupled(s, SpinBasis::Coupled).norm() - s.norm()) < 1e-12);
    }
}

TEST_CASE("t-J interaction acts only on the singlet channel") {
    const auto p = ModelParams::tj(2.0);
    const auto v = neighbour_interaction(p);
    // Singlet (ud - du)/sqrt2 has eigenvalue -J, the triplets 0.
    const double r = 1.0 / std::sqrt(2.0);
    const double s[4] = {0, r, -r, 0};
    for (int i = 0; i < 4; ++i) {
        double acc = 0;
        for (int j = 0; j < 4; ++j) acc += v[i][j] * s[j];
        CHECK(acc == Catch::Approx(-2.0 * s[i]).margin(1e-15));
    }
    const double t0[4] = {0, r, r, 0};
    for (int i = 0; i < 4; ++i) {
        double acc = 0;
        for (int j = 0; j < 4; ++j) acc += v[i][j] * t0[j];
        CHECK(acc == Catch::Approx(0.0).margin(1e-15));
    }
    CHECK(v[spin::UU][spin::UU] == 0.0);
}

TEST_CASE("channel amplitudes split spin channels") {
    TwoParticleBasis basis(3, false);
    CVector psi(basis.size(), 0.0);
    // (ud - du)/sqrt2 on sites (0, 2) plus the on-site singlet at site 1
    psi[static_cast<std::size_t>(basis.index_of_modes(0, 5))] = 0.5;
    psi[static_cast<std::size_t>(basis.index_of_modes(1, 4))] = -0.5;
    psi[static_cast<std::size_t>(basis.index_of_modes(2, 3))] = std::sqrt(0.5);
    auto s = channel_amplitudes(basis, psi, spin::S);
    auto t0 = channel_amplitudes(basis, psi, spin::T0);
    CHECK(std::abs(s[0 * 3 + 2] - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(s[1 * 3 + 1] - std::sqrt(0.5)) < 1e-15);
    CHECK(norm2(t0) < 1e-15);
}
