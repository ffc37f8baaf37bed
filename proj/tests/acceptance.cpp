// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers to run a subset.

#include "scatterlab/evolve2p.hpp"
#include "scatterlab/hamiltonians.hpp"
#include "scatterlab/logic.hpp"
#include "scatterlab/phases.hpp"
#include "scatterlab/scatter1p.hpp"
#include "scatterlab/switch.hpp"
#include "scatterlab/synth.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace scatterlab;

namespace {

constexpr double kPi = std::numbers::pi;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass_if(bool ok, const std::string& detail) { return {ok ? Verdict::Pass : Verdict::Fail, detail}; }

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome switch_certification() {
    const auto sw = catalog_switch("default-switch");
    const auto r = verify_switch(sw, Momentum(kPi / 4), Momentum(kPi / 2));
    const bool ok = r.passed && r.s31_low >= 1 - 1e-10 && r.s32_high >= 1 - 1e-10;
    return pass_if(ok, "|S31(pi/4)|=" + fmt("%.15f", r.s31_low) + " |S32(pi/2)|=" + fmt("%.15f", r.s32_high));
}

Outcome unitarity() {
    GraphBuilder b;
    const auto tri = b.add_path(3);
    b.connect(tri[0], tri[2]);
    const auto tail = b.add_path(2);
    b.connect(tri[1], tail[0]);
    const std::vector<ScatterGraph> graphs{catalog_switch("default-switch"), build_path(3),
                                           b.build({tri[0], tri[2], tail[1]})};
    double worst = 0;
    for (const auto& g : graphs)
        for (double k : {0.3, 0.7, 1.1, 1.9, 2.6}) worst = std::max(worst, s_matrix(g, Momentum(k)).unitarity_error());
    return pass_if(worst < 1e-10, "max ||S^dag S - I|| = " + fmt("%.3e", worst));
}

Outcome tj_limits() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mom(0.05, kPi - 0.05), coupling(0.0, 8.0);
    const cplx r0 = tj_reflection(RelativeKinematics::head_on(kPi / 4, kPi / 2), 0.0).R;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto kin = RelativeKinematics::head_on(mom(rng), mom(rng));
        const auto a = tj_reflection(kin, coupling(rng));
        worst = std::max({worst, std::abs(std::abs(a.R) - 1.0), std::abs(a.T)});
    }
    const double dev0 = std::abs(r0 + 1.0);
    return pass_if(dev0 < 1e-12 && worst < 1e-12,
                   "|R(J=0)+1|=" + fmt("%.2e", dev0) + " max||R|-1|=" + fmt("%.2e", worst));
}

Outcome hubbard_limits() {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> mom(0.05, kPi - 0.05), coupling(0.0, 20.0);
    const double theta0 = std::abs(std::arg(hubbard_phase(RelativeKinematics::head_on(kPi / 4, kPi / 2), 0.0)));
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto kin = RelativeKinematics::head_on(mom(rng), mom(rng));
        worst = std::max(worst, std::abs(std::abs(hubbard_phase(kin, coupling(rng))) - 1.0));
    }
    return pass_if(theta0 < 1e-12 && worst < 1e-12,
                   "theta(U=0)=" + fmt("%.2e", theta0) + " max||T+R|-1|=" + fmt("%.2e", worst));
}

struct SingletRuns {
    std::vector<ScalingStudy> studies;
    std::vector<TransmissionResult> transmission;
};

const SingletRuns& singlet_runs() {
    static const SingletRuns runs = [] {
        SingletRuns r;
        for (double J : {1.0, 2.0, 4.0}) {
            CollisionConfig c;
            c.model = ModelParams::tj(J);
            c.line_length = 512;
            r.studies.push_back(scaling_study(c, {16, 32, 64}));
            c.L = 64;
            r.transmission.push_back(channel_transmission(c));
        }
        return r;
    }();
    return runs;
}

Outcome phase_agreement() {
    const auto& runs = singlet_runs();
    bool ok = true;
    std::ostringstream d;
    const double Js[] = {1, 2, 4};
    for (std::size_t i = 0; i < runs.studies.size(); ++i) {
        const auto& s = runs.studies[i];
        ok = ok && s.phase_error_decreasing && s.rows.back().phase_error < 0.15;
        d << "J=" << Js[i] << ":";
        for (const auto& row : s.rows) d << ' ' << fmt("%.4f", row.phase_error);
        d << (i + 1 < runs.studies.size() ? "; " : "");
    }
    return pass_if(ok, d.str());
}

Outcome transmission_extinction() {
    double worst = 0;
    for (const auto& t : singlet_runs().transmission) worst = std::max(worst, t.transmitted);
    return pass_if(worst < 1e-3, "max transmitted at L=64: " + fmt("%.3e", worst));
}

Outcome triplet_triviality() {
    CollisionConfig c;
    c.model = ModelParams::tj(2.0);
    c.channel = spin::TPlus;
    c.L = 64;
    c.line_length = 512;
    const auto r = run_collision(c);
    return pass_if(r.overlap >= 1 - 1e-6, "overlap=" + fmt("%.15f", r.overlap));
}

std::vector<double> dense_spectrum(const CsrMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < m.dim(); ++r)
        m.for_each_in_row(r, [&](std::size_t c, double v) { d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v; });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

Outcome hubbard_dimer() {
    double worst = 0;
    for (double U : {0.0, 0.5, 2.0, 7.0}) {
        const auto ev = dense_spectrum(two_particle_h(build_path(2), ModelParams::hubbard(U)).entries);
        const double s = std::sqrt(U * U + 16);
        std::vector<double> want{0, 0, 0, U, 0.5 * (U + s), 0.5 * (U - s)};
        std::sort(want.begin(), want.end());
        if (ev.size() != want.size()) return {Verdict::Fail, "dimension " + std::to_string(ev.size())};
        for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(ev[i] - want[i]));
    }
    const auto ev = dense_spectrum(two_particle_h(build_path(2), ModelParams::hubbard(100.0)).entries);
    const double rel = std::abs(-ev.front() - 0.04) / 0.04;
    return pass_if(worst < 1e-10 && rel < 0.05,
                   "max spectrum deviation " + fmt("%.2e", worst) + ", gap vs 4t^2/U off by " + fmt("%.2f%%", 100 * rel));
}

Outcome continued_fractions() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto cf = continued_fraction(u(rng), kMaxConvergents);
        for (std::size_t r = 0; r < cf.convergents.size(); ++r) {
            const auto& c = cf.convergents[r];
            if (gcd(c.p, c.q) != 1 || !cf.within_inverse_square(r) || !denominator_growth_ok(cf, r))
                return {Verdict::Fail, "trial " + std::to_string(trial) + " convergent " + std::to_string(r)};
            ++checked;
        }
    }
    return {Verdict::Pass, std::to_string(checked) + " convergents checked"};
}

Outcome golden_synthesis() {
    const double theta = kPi * (std::sqrt(5.0) - 1.0) / 2.0, eps = 1e-3;
    // The constant is fixed by the worst case over all targets, not by the sample.
    const double C = static_cast<double>(covering_count(theta, eps)) * eps;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> gt(-kPi, kPi);
    long long kmax = 0;
    double worst = 0;
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
        const auto p = plan_power(theta, gt(rng), eps);
        kmax = std::max(kmax, p.k);
        worst = std::max(worst, p.achieved_error);
        ok = ok && p.achieved_error <= eps && static_cast<double>(p.k) <= C / eps;
    }
    return pass_if(ok, "C=" + fmt("%.3f", C) + " max k=" + std::to_string(kmax) + " max error=" + fmt("%.2e", worst));
}

Outcome rational_rejection() {
    try {
        plan_power(kPi / 4, 1.0, 1e-6);
    } catch (const UnreachableError& e) {
        return pass_if(e.period() == 4, "UNREACHABLE, period " + std::to_string(e.period()));
    }
    return {Verdict::Fail, "no UNREACHABLE raised"};
}

Outcome measurement() {
    const double p0 = third_spin_down_probability(encode_bits(0, 1));
    const double p1 = third_spin_down_probability(encode_bits(1, 1));
    const auto m0 = measure_third_spin(encode_bits(0, 1), 1'000'000, 2024);
    const auto m1 = measure_third_spin(encode_bits(1, 1), 1'000'000, 2024);
    double tail = 0;
    for (std::size_t R = 1; R <= 201; ++R)
        tail = std::max(tail, std::abs(majority_vote_error(1.0 / 3.0, R) - binomial_tail_error(1.0 / 3.0, R)));
    const bool ok = p0 == 0.0 && std::abs(p1 - 2.0 / 3.0) < 1e-15 && m0.downs == 0 &&
                    std::abs(m1.frequency - 2.0 / 3.0) <= 3 * m1.sigma && tail < 1e-12;
    return pass_if(ok, "P0=" + fmt("%.17g", p0) + " P1=" + fmt("%.17g", p1) + " freq1=" + fmt("%.6f", m1.frequency) +
                           " (3 sigma " + fmt("%.1e", 3 * m1.sigma) + ") vote/tail diff " + fmt("%.1e", tail));
}

Outcome schedule_symmetry() {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> rail(0, 5), len(1, 20);
    std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
    const auto sz = total_sz_operator(6), s2 = total_spin_squared_operator(6);
    const auto id = SpinOperator::Identity(64, 64);
    double unit = 0, cons = 0;
    for (int trial = 0; trial < 50; ++trial) {
        ExchangeSchedule s;
        s.n_logical = 2;
        for (std::size_t n = len(rng); s.steps.size() < n;) {
            ScheduleStep st{rail(rng), rail(rng), ang(rng), std::nullopt};
            if (st.i != st.j) s.steps.push_back(st);
        }
        const auto u = schedule_unitary(s);
        unit = std::max(unit, (u.adjoint() * u - id).cwiseAbs().maxCoeff());
        cons = std::max({cons, (u * sz - sz * u).cwiseAbs().maxCoeff(), (u * s2 - s2 * u).cwiseAbs().maxCoeff()});
    }
    return pass_if(unit < 1e-12 && cons < 1e-10,
                   "unitarity " + fmt("%.1e", unit) + ", commutators " + fmt("%.1e", cons));
}

Outcome quantization_study() {
    const char* path = std::getenv("SCATTERLAB_CNOT_SCHEDULE");
    if (!path || !*path) return {Verdict::Skip, "set SCATTERLAB_CNOT_SCHEDULE to a CNOT schedule file"};
    const auto s = load_schedule_file(path);
    const auto target = named_logical_gate(s.target.empty() ? "cnot" : s.target, s.n_logical);
    const double exact = element_error(logical_unitary(s).block, target);
    // t-J collisions at J = 2, head-on at (pi/4, pi/2).
    const double theta = std::arg(tj_reflection(RelativeKinematics::head_on(kPi / 4, kPi / 2), 2.0).R) / 2;
    const PhaseGate G = PhaseGate::singlet(2 * theta);
    std::ostringstream d;
    d << "exact " << fmt("%.2e", exact) << ", quantized";
    double prev = -1;
    bool increasing = true;
    for (double eps : {1e-6, 1e-4, 1e-2}) {
        const double e = element_error(logical_unitary(s, GateSource::collisions(G, eps)).block, target);
        increasing = increasing && e > prev;
        prev = e;
        d << ' ' << fmt("%.2e", e);
    }
    return pass_if(increasing && exact <= 6e-5, d.str());
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "momentum switch certification", switch_certification},
        {2, "S-matrix unitarity", unitarity},
        {3, "t-J analytic limits", tj_limits},
        {4, "Hubbard analytic limits", hubbard_limits},
        {5, "numeric vs analytic singlet phase", phase_agreement},
        {6, "singlet transmission extinction", transmission_extinction},
        {7, "triplet triviality", triplet_triviality},
        {8, "Hubbard dimer spectrum", hubbard_dimer},
        {9, "continued fraction exactness", continued_fractions},
        {10, "golden-ratio synthesis", golden_synthesis},
        {11, "rational phase rejection", rational_rejection},
        {12, "measurement statistics", measurement},
        {13, "schedule symmetry", schedule_symmetry},
        {14, "quantization degradation", quantization_study},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* v = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        if (o.verdict == Verdict::Fail) ++failures;
        std::printf("%-4s %2d %s: %s [%.1fs]\n", v, c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
