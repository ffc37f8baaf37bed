#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/phases.hpp"
#include "scatterlab/synth.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace scatterlab {

// Spin registers: spin 0 is the most significant bit of the basis index and
// a set bit means down. Logical qubit q occupies spins 3q, 3q+1, 3q+2.

using SpinVector = Eigen::VectorXcd;
using SpinOperator = Eigen::MatrixXcd;

inline constexpr std::size_t kSpinsPerQubit = 3;

inline std::size_t spin_dimension(std::size_t n_spins) { return std::size_t{1} << n_spins; }

inline bool spin_is_down(std::size_t index, std::size_t spin, std::size_t n_spins) {
    return (index >> (n_spins - 1 - spin)) & 1u;
}

/// |0_L> = |S>|up>, |1_L> = sqrt(2/3)|up up down> - (1/sqrt 3)|T0>|up> on three spins.
inline SpinVector logical_basis_triple(int bit) {
    SpinVector v = SpinVector::Zero(8);
    const double r2 = 1.0 / std::sqrt(2.0);
    // index = 4 b0 + 2 b1 + b2
    if (bit == 0) {
        v(0b010) = r2;   // up down up
        v(0b100) = -r2;  // down up up
    } else if (bit == 1) {
        const double a = std::sqrt(2.0 / 3.0), b = 1.0 / std::sqrt(3.0);
        v(0b001) = a;         // up up down
        v(0b010) = -b * r2;   // T0 up
        v(0b100) = -b * r2;
    } else {
        throw ConfigError("logical bit must be 0 or 1");
    }
    return v;
}

inline SpinVector kron(const SpinVector& a, const SpinVector& b) {
    SpinVector r(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
    return r;
}

/// Physical image of the computational basis state |bits> (qubit 0 most significant).
inline SpinVector logical_basis_state(std::size_t bits, std::size_t n_logical) {
    if (n_logical == 0) throw ConfigError("need at least one logical qubit");
    if (bits >= (std::size_t{1} << n_logical)) throw ConfigError("logical basis index out of range");
    SpinVector v = SpinVector::Ones(1);
    for (std::size_t q = 0; q < n_logical; ++q) {
        const int b = static_cast<int>((bits >> (n_logical - 1 - q)) & 1u);
        v = kron(v, logical_basis_triple(b));
    }
    return v;
}

struct LogicalQubitState {
    SpinVector physical;
    std::size_t n_logical = 1;
    double leakage = 0.0;  // weight outside the code space

    std::size_t n_spins() const { return kSpinsPerQubit * n_logical; }
};

/// Columns are the encoded logical basis states.
inline SpinOperator code_isometry(std::size_t n_logical) {
    const std::size_t dl = std::size_t{1} << n_logical;
    SpinOperator e(static_cast<Eigen::Index>(spin_dimension(kSpinsPerQubit * n_logical)), static_cast<Eigen::Index>(dl));
    for (std::size_t b = 0; b < dl; ++b) e.col(static_cast<Eigen::Index>(b)) = logical_basis_state(b, n_logical);
    return e;
}

inline LogicalQubitState encode(const Eigen::VectorXcd& logical, std::size_t n_logical) {
    if (logical.size() != (Eigen::Index{1} << n_logical)) throw ConfigError("logical amplitude count must be 2^n");
    if (std::abs(logical.norm() - 1.0) > 1e-12) throw ConfigError("logical amplitudes must be normalized");
    return {code_isometry(n_logical) * logical, n_logical, 0.0};
}

inline LogicalQubitState encode_bits(std::size_t bits, std::size_t n_logical) {
    return {logical_basis_state(bits, n_logical), n_logical, 0.0};
}

struct Decoded {
    Eigen::VectorXcd logical;
    double leakage = 0.0;  // 1 - |projection|^2
};

inline Decoded decode(const LogicalQubitState& s) {
    const auto e = code_isometry(s.n_logical);
    if (e.rows() != s.physical.size()) throw ConfigError("state size does not match the logical qubit count");
    Decoded d;
    d.logical = e.adjoint() * s.physical;
    d.leakage = std::max(0.0, s.physical.squaredNorm() - d.logical.squaredNorm());
    return d;
}

// ---------------------------------------------------------------------------
// Exchange schedules

struct ScheduleStep {
    std::size_t i = 0, j = 1;  // spin (rail) pair
    double gamma_t = 0.0;
    std::optional<long long> k;  // collision count, if fixed by the file
};

struct ExchangeSchedule {
    std::size_t n_logical = 1;
    std::string target;  // "", identity, not, swap, cnot, cz
    std::string provenance;
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<ScheduleStep> steps;

    std::size_t n_spins() const { return kSpinsPerQubit * n_logical; }
};

inline void validate_schedule(const ExchangeSchedule& s) {
    if (s.n_logical < 1 || s.n_logical > 2) throw ConfigError("schedules support 1 or 2 logical qubits");
    for (std::size_t n = 0; n < s.steps.size(); ++n) {
        const auto& st = s.steps[n];
        const std::string where = "steps[" + std::to_string(n) + "]";
        if (st.i >= s.n_spins() || st.j >= s.n_spins()) throw ConfigError(where + ": rail out of range");
        if (st.i == st.j) throw ConfigError(where + ": a step needs two distinct rails");
        if (!std::isfinite(st.gamma_t)) throw ConfigError(where + ": gamma_t must be finite");
        if (st.k && *st.k < 1) throw ConfigError(where + ": collision count must be positive");
    }
    static const char* known[] = {"", "identity", "not", "swap", "cnot", "cz"};
    bool ok = false;
    for (const char* k : known) ok = ok || s.target == k;
    if (!ok) throw ConfigError("unknown schedule target '" + s.target + "'");
    if ((s.target == "swap" || s.target == "cnot" || s.target == "cz") && s.n_logical != 2)
        throw ConfigError("target '" + s.target + "' needs two logical qubits");
}

inline ExchangeSchedule schedule_from_json(const nlohmann::json& j, const std::string& where = "schedule") {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    static const char* allowed[] = {"metadata", "n_logical", "target", "steps", "provenance"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ParseError(where + "." + it.key(), "unknown key");
    }
    ExchangeSchedule s;
    if (!j.contains("n_logical") || !j["n_logical"].is_number_unsigned())
        throw ParseError(where + ".n_logical", "missing or not a positive integer");
    s.n_logical = j["n_logical"].get<std::size_t>();
    if (j.contains("target")) {
        if (!j["target"].is_string()) throw ParseError(where + ".target", "expected a string");
        s.target = j["target"].get<std::string>();
    }
    if (j.contains("provenance")) {
        if (!j["provenance"].is_string()) throw ParseError(where + ".provenance", "expected a string");
        s.provenance = j["provenance"].get<std::string>();
    }
    if (j.contains("metadata")) s.metadata = j["metadata"];
    if (!j.contains("steps") || !j["steps"].is_array()) throw ParseError(where + ".steps", "missing step list");
    const auto& steps = j["steps"];
    for (std::size_t n = 0; n < steps.size(); ++n) {
        const std::string w = where + ".steps[" + std::to_string(n) + "]";
        const auto& e = steps[n];
        if (!e.is_object()) throw ParseError(w, "expected an object");
        for (auto it = e.begin(); it != e.end(); ++it)
            if (it.key() != "pair" && it.key() != "gamma_t" && it.key() != "k")
                throw ParseError(w + "." + it.key(), "unknown key");
        if (!e.contains("pair") || !e["pair"].is_array() || e["pair"].size() != 2 || !e["pair"][0].is_number_unsigned() ||
            !e["pair"][1].is_number_unsigned())
            throw ParseError(w + ".pair", "expected two rail indices");
        if (!e.contains("gamma_t") || !e["gamma_t"].is_number()) throw ParseError(w + ".gamma_t", "expected a number");
        ScheduleStep st;
        st.i = e["pair"][0].get<std::size_t>();
        st.j = e["pair"][1].get<std::size_t>();
        st.gamma_t = e["gamma_t"].get<double>();
        if (e.contains("k")) {
            if (!e["k"].is_number_integer()) throw ParseError(w + ".k", "expected an integer");
            st.k = e["k"].get<long long>();
        }
        s.steps.push_back(st);
    }
    try {
        validate_schedule(s);
    } catch (const ConfigError& err) {
        throw ParseError(where, err.what());
    }
    return s;
}

inline ExchangeSchedule load_schedule_file(const std::string& path) {
    return schedule_from_json(parse_json_text(read_text_file(path), path), path);
}

inline nlohmann::json schedule_to_json(const ExchangeSchedule& s) {
    nlohmann::json j;
    j["metadata"] = s.metadata;
    j["n_logical"] = s.n_logical;
    if (!s.target.empty()) j["target"] = s.target;
    if (!s.provenance.empty()) j["provenance"] = s.provenance;
    j["steps"] = nlohmann::json::array();
    for (const auto& st : s.steps) {
        nlohmann::json e;
        e["pair"] = {st.i, st.j};
        e["gamma_t"] = st.gamma_t;
        if (st.k) e["k"] = *st.k;
        j["steps"].push_back(e);
    }
    return j;
}

/**
 * Where the per-step gates come from. Exact applies exp(i gt S.S) with the
 * global phase exp(i gt/4) removed. Collisions applies G^k for a per-step G
 * (analytic or a numeric estimate), with k planned by plan_power at epsilon
 * unless the step fixes it.
 */
struct GateSource {
    enum class Kind { Exact, Collisions } kind = Kind::Exact;
    PhaseGate G;           // per-step gate, Collisions only
    double epsilon = 1e-3;
    long long budget = kDefaultBudget;

    static GateSource exact() { return {}; }
    static GateSource collisions(const PhaseGate& G, double epsilon) {
        GateSource s;
        s.kind = Kind::Collisions;
        s.G = G;
        s.epsilon = epsilon;
        return s;
    }
    /// Phase per collision seen by plan_power: G's singlet phase relative to T+, halved.
    double theta() const { return 0.5 * std::arg(G.diag[spin::S] / G.diag[spin::TPlus]); }
};

struct ResolvedStep {
    std::size_t i = 0, j = 1;
    double gamma_t = 0.0;
    long long k = 0;  // 0 for exact gates
    double phase_error = 0.0;
    PhaseGate gate;
};

inline std::vector<ResolvedStep> resolve_schedule(const ExchangeSchedule& s, const GateSource& src) {
    validate_schedule(s);
    std::vector<ResolvedStep> out;
    for (const auto& st : s.steps) {
        ResolvedStep r{st.i, st.j, st.gamma_t, 0, 0.0, {}};
        if (src.kind == GateSource::Kind::Exact) {
            r.gate = PhaseGate::singlet(-st.gamma_t);
        } else {
            const double theta = src.theta();
            if (st.k) {
                r.k = *st.k;
            } else {
                r.k = plan_power(theta, st.gamma_t, src.epsilon, Orientation::Heisenberg, src.budget).k;
            }
            r.phase_error = circle_distance(power_phase(theta, r.k), singlet_target(st.gamma_t, Orientation::Heisenberg));
            r.gate = gate_power(src.G, r.k);
        }
        out.push_back(r);
    }
    return out;
}

/// Applies a coupled-basis diagonal gate to spins (i, j) of a register.
inline void apply_pair_gate(SpinVector& psi, std::size_t n_spins, std::size_t i, std::size_t j, const PhaseGate& g) {
    if (i >= n_spins || j >= n_spins || i == j) throw ConfigError("pair gate rails out of range");
    if (psi.size() != static_cast<Eigen::Index>(spin_dimension(n_spins))) throw ConfigError("register size mismatch");
    const Eigen::Matrix4cd u = g.uncoupled_matrix();
    const std::size_t bi = std::size_t{1} << (n_spins - 1 - i), bj = std::size_t{1} << (n_spins - 1 - j);
    const std::size_t dim = spin_dimension(n_spins);
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & (bi | bj)) continue;
        const std::size_t idx[4] = {base, base | bj, base | bi, base | bi | bj};  // uu, ud, du, dd
        Eigen::Vector4cd v;
        for (int a = 0; a < 4; ++a) v(a) = psi(static_cast<Eigen::Index>(idx[a]));
        const Eigen::Vector4cd w = u * v;
        for (int a = 0; a < 4; ++a) psi(static_cast<Eigen::Index>(idx[a])) = w(a);
    }
}

inline void apply_resolved(SpinVector& psi, std::size_t n_spins, const std::vector<ResolvedStep>& steps) {
    for (const auto& st : steps) apply_pair_gate(psi, n_spins, st.i, st.j, st.gate);
}

/// Applies the schedule in list order. Steps on disjoint pairs commute.
inline LogicalQubitState apply_schedule(const LogicalQubitState& state, const ExchangeSchedule& s,
                                        const GateSource& src = GateSource::exact()) {
    if (state.n_logical != s.n_logical) throw ConfigError("schedule and state disagree on the logical qubit count");
    LogicalQubitState out = state;
    apply_resolved(out.physical, s.n_spins(), resolve_schedule(s, src));
    out.leakage = decode(out).leakage;
    return out;
}

/// Full 2^n_spins unitary of a schedule.
inline SpinOperator schedule_unitary(const ExchangeSchedule& s, const GateSource& src = GateSource::exact()) {
    const auto steps = resolve_schedule(s, src);
    const auto dim = static_cast<Eigen::Index>(spin_dimension(s.n_spins()));
    SpinOperator u = SpinOperator::Identity(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        SpinVector col = u.col(c);
        apply_resolved(col, s.n_spins(), steps);
        u.col(c) = col;
    }
    return u;
}

/// Total Sz and S^2 on a register.
inline SpinOperator total_sz_operator(std::size_t n_spins) {
    const auto dim = static_cast<Eigen::Index>(spin_dimension(n_spins));
    SpinOperator m = SpinOperator::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
        double sz = 0;
        for (std::size_t s = 0; s < n_spins; ++s) sz += spin_is_down(static_cast<std::size_t>(x), s, n_spins) ? -0.5 : 0.5;
        m(x, x) = sz;
    }
    return m;
}

inline SpinOperator total_spin_squared_operator(std::size_t n_spins) {
    const auto dim = static_cast<Eigen::Index>(spin_dimension(n_spins));
    const auto sz = total_sz_operator(n_spins);
    SpinOperator sp = SpinOperator::Zero(dim, dim);  // S+ = sum_s sigma+_s
    for (Eigen::Index x = 0; x < dim; ++x)
        for (std::size_t s = 0; s < n_spins; ++s) {
            const std::size_t bit = std::size_t{1} << (n_spins - 1 - s);
            if (static_cast<std::size_t>(x) & bit) sp(static_cast<Eigen::Index>(static_cast<std::size_t>(x) & ~bit), x) += 1.0;
        }
    // S^2 = S- S+ + Sz^2 + Sz
    return sp.adjoint() * sp + sz * sz + sz;
}

struct LogicalUnitary {
    SpinOperator block;     // <a_L| U |b_L>
    double leakage = 0.0;   // largest singular value of (I - P) U P
};

inline LogicalUnitary logical_unitary(const ExchangeSchedule& s, const GateSource& src = GateSource::exact()) {
    validate_schedule(s);
    const auto steps = resolve_schedule(s, src);
    const auto e = code_isometry(s.n_logical);
    SpinOperator ue = e;
    for (Eigen::Index c = 0; c < ue.cols(); ++c) {
        SpinVector col = ue.col(c);
        apply_resolved(col, s.n_spins(), steps);
        ue.col(c) = col;
    }
    LogicalUnitary r;
    r.block = e.adjoint() * ue;
    const SpinOperator out = ue - e * r.block;
    Eigen::JacobiSVD<SpinOperator> svd(out);
    r.leakage = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return r;
}

inline SpinOperator named_logical_gate(const std::string& name, std::size_t n_logical) {
    const auto d = Eigen::Index{1} << n_logical;
    SpinOperator m = SpinOperator::Identity(d, d);
    if (name.empty() || name == "identity") return m;
    if (name == "not" && n_logical == 1) {
        m << 0, 1, 1, 0;
        return m;
    }
    if (n_logical == 2) {
        m.setZero();
        if (name == "cnot") {  // control = qubit 0 (most significant)
            m(0, 0) = m(1, 1) = 1;
            m(2, 3) = m(3, 2) = 1;
            return m;
        }
        if (name == "swap") {
            m(0, 0) = m(3, 3) = 1;
            m(1, 2) = m(2, 1) = 1;
            return m;
        }
        if (name == "cz") {
            m(0, 0) = m(1, 1) = m(2, 2) = 1;
            m(3, 3) = -1;
            return m;
        }
    }
    throw ConfigError("no logical gate '" + name + "' on " + std::to_string(n_logical) + " qubits");
}

/// max |e^{-i phi} M - T| with phi = arg tr(T^dag M): element error after
/// removing the global phase, which no measurement can see.
inline double element_error(const SpinOperator& m, const SpinOperator& target) {
    if (m.rows() != target.rows() || m.cols() != target.cols()) throw ConfigError("gate dimensions differ");
    const cplx tr = (target.adjoint() * m).trace();
    const cplx ph = std::abs(tr) > 0 ? std::conj(tr) / std::abs(tr) : cplx(1.0);
    return (ph * m - target).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Preparation of |0_L>

struct PreparationResult {
    SpinVector state;            // three spins
    double singlet_phase = 0.0;  // 2 k theta actually applied
    bool phase_fixed = false;
    double fidelity = 0.0;       // |<0_L|state>|^2
};

inline constexpr double kPreparationMaxError = 0.1;

/**
 * Starts from |up down up>, applies the planned singlet phase 2 k theta on
 * rails (0, 1), aiming at pi/2, which gives (|ud> - i|du>)|u>/sqrt 2, and then
 * an ideal phase diag(1, e^{-i pi/2}) on spin 0 to land on |S>|u>.
 */
inline PreparationResult prepare_singlet_protocol(const SynthesisPlan& plan, bool apply_phase_fix = true) {
    const double want = std::numbers::pi / 2;
    if (circle_distance(plan.target_phase, want) > 1e-12)
        throw ConfigError("the preparation plan must target a singlet phase of pi/2");
    if (!(plan.achieved_error <= kPreparationMaxError))
        throw ConfigError("plan error " + std::to_string(plan.achieved_error) + " is too coarse for preparation");
    PreparationResult r;
    r.singlet_phase = plan.k > 0 ? power_phase(plan.theta, plan.k) : want;
    r.state = SpinVector::Zero(8);
    r.state(0b010) = 1.0;
    apply_pair_gate(r.state, 3, 0, 1, PhaseGate::singlet(r.singlet_phase));
    if (apply_phase_fix) {
        for (Eigen::Index x = 0; x < 8; ++x)
            if (spin_is_down(static_cast<std::size_t>(x), 0, 3)) r.state(x) *= std::polar(1.0, -want);
        r.phase_fixed = true;
    }
    r.fidelity = std::norm(logical_basis_triple(0).dot(r.state));
    return r;
}

/// The ideal plan: exactly pi/2 on the singlet (k = 0 marks "exact").
inline SynthesisPlan exact_quarter_turn_plan() {
    SynthesisPlan p;
    p.target_phase = std::numbers::pi / 2;
    p.gamma_t = -std::numbers::pi / 2;
    return p;
}

// ---------------------------------------------------------------------------
// Measurement

struct MeasurementStats {
    double p_down = 0.0;  // exact
    std::uint64_t shots = 0;
    std::uint64_t downs = 0;
    double frequency = 0.0;
    double sigma = 0.0;   // binomial standard deviation of the frequency
    std::uint64_t seed = 0;
};

/// Exact probability that the third spin of logical qubit q reads down.
inline double third_spin_down_probability(const LogicalQubitState& s, std::size_t qubit = 0) {
    if (qubit >= s.n_logical) throw ConfigError("logical qubit out of range");
    const std::size_t n = s.n_spins(), spin = kSpinsPerQubit * qubit + 2;
    double p = 0, total = 0;
    for (Eigen::Index x = 0; x < s.physical.size(); ++x) {
        const double w = std::norm(s.physical(x));
        total += w;
        if (spin_is_down(static_cast<std::size_t>(x), spin, n)) p += w;
    }
    return p / total;
}

inline MeasurementStats measure_third_spin(const LogicalQubitState& s, std::uint64_t shots, std::uint64_t seed,
                                           std::size_t qubit = 0) {
    if (shots == 0) throw ConfigError("need at least one shot");
    MeasurementStats m;
    m.p_down = third_spin_down_probability(s, qubit);
    m.shots = shots;
    m.seed = seed;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(m.p_down);
    for (std::uint64_t i = 0; i < shots; ++i) m.downs += coin(rng) ? 1u : 0u;
    m.frequency = static_cast<double>(m.downs) / static_cast<double>(shots);
    m.sigma = std::sqrt(m.p_down * (1.0 - m.p_down) / static_cast<double>(shots));
    return m;
}

/**
 * Probability that a majority vote over R repetitions is wrong when each run
 * is wrong with probability p. Ties (even R) are broken by a fair coin.
 * Computed by propagating the error-count distribution run by run.
 */
inline double majority_vote_error(double p, std::size_t R) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("error probability must lie in [0, 1]");
    if (R == 0) throw ConfigError("need at least one repetition");
    std::vector<double> dist(R + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t r = 1; r <= R; ++r)
        for (std::size_t e = r; e-- > 0;) {
            dist[e + 1] += dist[e] * p;
            dist[e] *= 1.0 - p;
        }
    double err = 0.0;
    for (std::size_t e = 0; e <= R; ++e) {
        if (2 * e > R) err += dist[e];
        if (2 * e == R) err += 0.5 * dist[e];
    }
    return err;
}

/// Same quantity from the closed-form binomial tail sum_{e > R/2} C(R,e) p^e (1-p)^{R-e}.
inline double binomial_tail_error(double p, std::size_t R) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("error probability must lie in [0, 1]");
    if (R == 0) throw ConfigError("need at least one repetition");
    auto term = [&](std::size_t e) {
        if (p == 0.0) return e == 0 ? 1.0 : 0.0;
        if (p == 1.0) return e == R ? 1.0 : 0.0;
        const double lc = std::lgamma(static_cast<double>(R) + 1) - std::lgamma(static_cast<double>(e) + 1) -
                          std::lgamma(static_cast<double>(R - e) + 1);
        return std::exp(lc + static_cast<double>(e) * std::log(p) + static_cast<double>(R - e) * std::log1p(-p));
    };
    double err = 0.0;
    for (std::size_t e = R / 2 + 1; e <= R; ++e) err += term(e);
    if (R % 2 == 0) err += 0.5 * term(R / 2);
    return err;
}

}  // namespace scatterlab
