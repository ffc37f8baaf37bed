#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/graph.hpp"
#include "scatterlab/hamiltonians.hpp"
#include "scatterlab/phases.hpp"
#include "scatterlab/propagator.hpp"
#include "scatterlab/scatter1p.hpp"
#include "scatterlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace scatterlab {

// ---------------------------------------------------------------------------
// Two-particle states

struct TwoParticleWavefunction {
    std::shared_ptr<const ScatterGraph> graph;
    std::shared_ptr<const TwoParticleBasis> basis;
    ModelParams model;
    CVector amplitudes;
    std::vector<std::size_t> boundary;  // sites whose occupation counts as leakage

    double norm() const { return norm2(amplitudes); }
};

/// Single-particle packet on a line: L sites starting at center - L/2, spin (up, down) amplitudes.
struct PacketSpec {
    std::size_t center = 0;
    std::size_t length = 2;
    Momentum momentum;
    std::array<cplx, 2> spin{1.0, 0.0};
    PacketShape shape = PacketShape::Square;

    std::vector<std::size_t> sites() const {
        if (length < 2) throw ConfigError("packet length must be at least 2");
        if (center < length / 2) throw ConfigError("packet extends past site 0");
        std::vector<std::size_t> s(length);
        for (std::size_t i = 0; i < length; ++i) s[i] = center - length / 2 + i;
        return s;
    }
};

inline SpinHalfPairState product_spin(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
    SpinHalfPairState s;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s.amplitudes[static_cast<std::size_t>(2 * i + j)] = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return s;
}

/// Spin state with a single coupled-basis component (T+, T0, S or T-).
inline SpinHalfPairState coupled_spin(int channel) {
    SpinHalfPairState c;
    c.basis = SpinBasis::Coupled;
    c.amplitudes[static_cast<std::size_t>(channel)] = 1.0;
    return coupled_uncoupled(c, SpinBasis::Uncoupled);
}

/// The 2Sz sector a spin pair lives in, if it has a definite one.
inline std::optional<int> spin_sector(const SpinHalfPairState& s) {
    const auto u = coupled_uncoupled(s, SpinBasis::Uncoupled);
    std::optional<int> sector;
    const int two_sz[4] = {2, 0, 0, -2};
    for (int i = 0; i < 4; ++i) {
        if (std::abs(u.amplitudes[static_cast<std::size_t>(i)]) < 1e-15) continue;
        if (sector && *sector != two_sz[i]) return std::nullopt;
        sector = two_sz[i];
    }
    return sector;
}

/**
 * Antisymmetrized two-packet state
 *   sum_{a,b,s,u} f1(a) f2(b) chi(s,u) c+_{a s} c+_{b u} |0>,
 * normalized. chi is given in the uncoupled basis with particle 1 first. The
 * basis is restricted to the spin state's Sz sector when it has one.
 */
inline TwoParticleWavefunction prepare_two_packets(std::shared_ptr<const ScatterGraph> g, const CVector& f1,
                                                   const CVector& f2, const SpinHalfPairState& spin_state,
                                                   const ModelParams& model, bool restrict_sector = true) {
    const std::size_t n = g->vertex_count();
    if (f1.size() != n || f2.size() != n) throw ConfigError("packet dimension does not match the graph");
    const auto chi = coupled_uncoupled(spin_state, SpinBasis::Uncoupled);
    auto basis = std::make_shared<const TwoParticleBasis>(n, model.hard_core(),
                                                          restrict_sector ? spin_sector(chi) : std::nullopt);
    TwoParticleWavefunction wf{g, basis, model, CVector(basis->size(), 0.0), {}};

    std::vector<std::size_t> s1, s2;
    for (std::size_t v = 0; v < n; ++v) {
        if (f1[v] != cplx(0.0)) s1.push_back(v);
        if (f2[v] != cplx(0.0)) s2.push_back(v);
    }
    for (std::size_t a : s1)
        for (std::size_t b : s2)
            for (int s = 0; s < 2; ++s)
                for (int u = 0; u < 2; ++u) {
                    const cplx c = f1[a] * f2[b] * chi.amplitudes[static_cast<std::size_t>(2 * s + u)];
                    if (c == cplx(0.0)) continue;
                    const auto m1 = static_cast<std::uint32_t>(2 * a + static_cast<std::size_t>(s));
                    const auto m2 = static_cast<std::uint32_t>(2 * b + static_cast<std::size_t>(u));
                    if (m1 == m2) continue;
                    const auto idx = m1 < m2 ? basis->index_of_modes(m1, m2) : basis->index_of_modes(m2, m1);
                    if (idx < 0) continue;  // double occupancy in a hard-core basis
                    wf.amplitudes[static_cast<std::size_t>(idx)] += m1 < m2 ? c : -c;
                }
    const double nrm = norm2(wf.amplitudes);
    if (nrm < 1e-12) throw PauliExclusionError("antisymmetrized two-packet state vanishes (identical packets)");
    for (auto& z : wf.amplitudes) z /= nrm;

    std::vector<char> in1(n, 0);
    for (auto a : s1) in1[a] = 1;
    for (auto b : s2)
        if (in1[b]) throw ConfigError("packet supports overlap at site " + std::to_string(b));
    return wf;
}

/// Two packets on a line (path graph), particle 1 from spec1.
inline TwoParticleWavefunction prepare_two_packets(std::size_t line_length, const PacketSpec& spec1,
                                                   const PacketSpec& spec2, const ModelParams& model) {
    auto g = std::make_shared<const ScatterGraph>(build_path(line_length));
    for (const auto* s : {&spec1, &spec2})
        if (s->center - s->length / 2 + s->length > line_length) throw ConfigError("packet extends past the line end");
    auto f1 = packet_on_sites(line_length, spec1.sites(), spec1.momentum, spec1.shape);
    auto f2 = packet_on_sites(line_length, spec2.sites(), spec2.momentum, spec2.shape);
    return prepare_two_packets(g, f1, f2, product_spin(spec1.spin, spec2.spin), model);
}

/// Copies a state into another basis on the same sites (e.g. t-J into Hubbard).
inline CVector embed(const TwoParticleBasis& from, std::span<const cplx> psi, const TwoParticleBasis& to) {
    if (from.n_sites() != to.n_sites()) throw ConfigError("bases on different site counts");
    CVector out(to.size(), 0.0);
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (psi[i] == cplx(0.0)) continue;
        const auto s = from.state(i);
        const auto j = to.index_of_modes(s.m1, s.m2);
        if (j < 0) throw ConfigError("state has weight outside the target basis");
        out[static_cast<std::size_t>(j)] = psi[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// Probability that at least one particle sits on a boundary site.
inline double boundary_probability(const TwoParticleWavefunction& wf) {
    if (wf.boundary.empty()) return 0.0;
    std::vector<char> mask(wf.graph->vertex_count(), 0);
    for (auto v : wf.boundary) mask[v] = 1;
    double p = 0;
    for (std::size_t i = 0; i < wf.basis->size(); ++i) {
        const auto s = wf.basis->state(i);
        if (mask[s.site1()] || mask[s.site2()]) p += std::norm(wf.amplitudes[i]);
    }
    return p;
}

/// Probability of the two particles being within graph distance `radius`.
inline double interaction_region_probability(const TwoParticleWavefunction& wf, std::size_t radius = 2) {
    const auto& g = *wf.graph;
    double p = 0;
    // Multi-source BFS would be overkill: radius is tiny, so walk neighbourhoods.
    for (std::size_t i = 0; i < wf.basis->size(); ++i) {
        const double w = std::norm(wf.amplitudes[i]);
        if (w == 0.0) continue;
        const auto s = wf.basis->state(i);
        std::vector<std::size_t> frontier{s.site1()}, seen{s.site1()};
        bool near = s.site1() == s.site2();
        for (std::size_t d = 0; d < radius && !near; ++d) {
            std::vector<std::size_t> next;
            for (auto v : frontier)
                for (auto u : g.neighbors(v)) {
                    if (u == s.site2()) near = true;
                    if (std::find(seen.begin(), seen.end(), u) == seen.end()) {
                        seen.push_back(u);
                        next.push_back(u);
                    }
                }
            frontier = std::move(next);
        }
        if (near) p += w;
    }
    return p;
}

/// <Sz> and <S^2> of a state (exact operators on its basis).
inline std::pair<double, double> spin_expectations(const TwoParticleWavefunction& wf) {
    CVector tmp(wf.amplitudes.size());
    total_sz(*wf.basis).multiply(wf.amplitudes, tmp);
    const double sz = inner(wf.amplitudes, tmp).real();
    total_spin_squared(*wf.basis).multiply(wf.amplitudes, tmp);
    const double s2 = inner(wf.amplitudes, tmp).real();
    return {sz, s2};
}

// ---------------------------------------------------------------------------
// Evolution

inline constexpr double kLeakageWarning = 1e-3;
inline constexpr double kLeakageError = 1e-2;

/// Holds a two-particle Hamiltonian and its propagator for repeated use.
class TwoParticleEvolver {
public:
    TwoParticleEvolver(const ScatterGraph& g, const ModelParams& p, std::shared_ptr<const TwoParticleBasis> basis)
        : basis_(std::move(basis)), h_(two_particle_h(g, p, *basis_)), prop_(h_.entries) {
        if (p.t == 0.0) throw ConfigError("dynamics needs t != 0");
    }
    TwoParticleEvolver(const TwoParticleEvolver&) = delete;
    TwoParticleEvolver& operator=(const TwoParticleEvolver&) = delete;

    CVector evolve(std::span<const cplx> psi, double duration, double tol = 1e-12) const {
        return prop_.apply(psi, duration, tol);
    }

    const SparseHamiltonian& hamiltonian() const { return h_; }

private:
    std::shared_ptr<const TwoParticleBasis> basis_;
    SparseHamiltonian h_;
    ChebyshevPropagator prop_;
};

struct Evolution2p {
    TwoParticleWavefunction state;
    double leakage = 0.0;
    bool leakage_warning = false;
};

/// exp(-i H2 T) applied to the state. Boundary probability above 1e-3 sets a
/// warning; above 1e-2 it is an error.
inline Evolution2p evolve_2p(const TwoParticleWavefunction& wf, double duration, double tol = 1e-12,
                             const TwoParticleEvolver* evolver = nullptr) {
    if (std::abs(wf.norm() - 1.0) > 1e-10) throw ConfigError("initial two-particle state must be normalized");
    std::optional<TwoParticleEvolver> own;
    if (!evolver) evolver = &own.emplace(*wf.graph, wf.model, wf.basis);
    Evolution2p out{wf, 0.0, false};
    out.state.amplitudes = evolver->evolve(wf.amplitudes, duration, tol);
    out.leakage = boundary_probability(out.state);
    if (out.leakage > kLeakageError)
        throw LeakageError("boundary probability " + std::to_string(out.leakage) + " exceeds 1e-2", out.leakage);
    out.leakage_warning = out.leakage > kLeakageWarning;
    return out;
}

// ---------------------------------------------------------------------------
// Phase extraction

struct PhaseMeasurement {
    double theta = 0.0;    // Arg <reference|actual> in the chosen spin channel
    double overlap = 0.0;  // |<reference|actual>| / (|reference| |actual|)
    double channel_weight = 0.0;
};

/**
 * Compares the spin-channel components of two states on the same sites.
 * The reference is the same initial state evolved without interaction
 * (free fermions), so theta is the collision phase relative to free motion.
 */
inline PhaseMeasurement extract_phase(const TwoParticleWavefunction& actual, const TwoParticleWavefunction& reference,
                                      int channel = spin::S, double interaction_threshold = 1e-3) {
    const double near = interaction_region_probability(actual);
    if (near >= interaction_threshold)
        throw NumericalError("collision not complete: interaction-region probability " + std::to_string(near));
    const auto a = channel_amplitudes(*actual.basis, actual.amplitudes, channel);
    const auto r = channel_amplitudes(*reference.basis, reference.amplitudes, channel);
    const double na = norm2(a), nr = norm2(r);
    if (na < 1e-12 || nr < 1e-12) throw NumericalError("spin channel carries no weight");
    const cplx ov = inner(r, a);
    PhaseMeasurement m{std::arg(ov), std::abs(ov) / (na * nr), na * na};
    if (m.overlap < 0.5)
        throw UnreliablePhaseError("overlap with the reference is " + std::to_string(m.overlap) + " < 0.5", m.overlap);
    return m;
}

// ---------------------------------------------------------------------------
// Line collisions

struct CollisionConfig {
    ModelParams model = ModelParams::tj(1.0);
    double k1 = std::numbers::pi / 4;   // left packet, moving right
    double k2 = -std::numbers::pi / 2;  // right packet, moving left
    std::size_t L = 32;
    std::size_t line_length = 0;  // 0: max(512, 8L)
    PacketShape shape = PacketShape::Square;
    int channel = spin::S;
    double tol = 1e-12;
    double interaction_threshold = 1e-3;
    int max_extra_chunks = 60;

    std::size_t effective_line_length() const { return line_length ? line_length : std::max<std::size_t>(512, 8 * L); }
};

struct CollisionResult {
    std::size_t L = 0;
    std::size_t line_length = 0;
    double duration = 0.0;
    double theta_measured = 0.0;
    double theta_analytic = 0.0;
    double phase_error = 0.0;  // |wrap(measured - analytic)|
    double overlap = 0.0;
    double deficit = 0.0;      // 1 - overlap
    double interaction_probability = 0.0;
    double leakage = 0.0;
    bool leakage_warning = false;
};

/// Analytic collision phase of one spin channel relative to free fermions.
inline double analytic_channel_phase(const ModelParams& p, const RelativeKinematics& kin, int channel) {
    switch (p.model) {
        case Model::TJ: return channel == spin::S ? std::arg(tj_reflection(kin, p.J).R) : 0.0;
        case Model::Hubbard: return channel == spin::S ? std::arg(hubbard_phase(kin, p.U)) : 0.0;
        case Model::XXZ: return std::arg(gate_g_xxz(kin, p.Jx, p.Jz).channel_amplitudes[static_cast<std::size_t>(channel)]);
    }
    return 0.0;
}

inline SpinHalfPairState channel_input_spin(int channel) {
    if (channel == spin::TPlus) return product_spin({1.0, 0.0}, {1.0, 0.0});
    if (channel == spin::TMinus) return product_spin({0.0, 1.0}, {0.0, 1.0});
    return product_spin({1.0, 0.0}, {0.0, 1.0});  // up-down carries both T0 and S
}

/**
 * Head-on collision of two packets on a line, gap L between them. Evolves
 * 4L / |v1 - v2|, then in chunks of L / |v1 - v2| until the interaction-region
 * probability falls below the threshold, and measures the phase against the
 * interaction-free evolution of the same state.
 */
inline CollisionResult run_collision(const CollisionConfig& cfg) {
    RelativeKinematics kin(cfg.k1, cfg.k2);
    if (!kin.approaching()) throw ConfigError("packets do not approach: need 2 sin k1 > 2 sin k2");
    if (cfg.L < 2) throw ConfigError("packet length must be at least 2");
    const std::size_t N = cfg.effective_line_length();
    const std::size_t L = cfg.L;
    if (N < 4 * L + 8) throw ConfigError("line too short for the packets");

    auto g = std::make_shared<const ScatterGraph>(build_path(N));
    const std::size_t a1 = N / 2 - L - L / 2, a2 = N / 2 + L / 2;
    std::vector<std::size_t> s1(L), s2(L);
    for (std::size_t i = 0; i < L; ++i) {
        s1[i] = a1 + i;
        s2[i] = a2 + i;
    }
    // Absolute positions in the plane-wave phase keep the two packets on the same footing.
    CVector f1(N, 0.0), f2(N, 0.0);
    {
        const auto e1 = packet_on_sites(N, s1, kin.k1(), cfg.shape);
        const auto e2 = packet_on_sites(N, s2, kin.k2(), cfg.shape);
        for (std::size_t v = 0; v < N; ++v) {
            f1[v] = e1[v] * std::exp(cplx(0, kin.k1().value() * static_cast<double>(a1)));
            f2[v] = e2[v] * std::exp(cplx(0, kin.k2().value() * static_cast<double>(a2)));
        }
    }
    const auto spin_in = channel_input_spin(cfg.channel);
    auto actual = prepare_two_packets(g, f1, f2, spin_in, cfg.model);
    const std::size_t edge = std::max<std::size_t>(4, N / 32);
    for (std::size_t v = 0; v < edge; ++v) {
        actual.boundary.push_back(v);
        actual.boundary.push_back(N - 1 - v);
    }
    auto reference = prepare_two_packets(g, f1, f2, spin_in, ModelParams::hubbard(0.0, cfg.model.t));
    reference.boundary = actual.boundary;

    TwoParticleEvolver ev_actual(*g, actual.model, actual.basis);
    TwoParticleEvolver ev_free(*g, reference.model, reference.basis);

    const double dv = kin.closing_velocity(cfg.model.t);
    const double chunk = static_cast<double>(L) / dv;
    double T = 4.0 * chunk;
    actual = evolve_2p(actual, T, cfg.tol, &ev_actual).state;
    double near = interaction_region_probability(actual);
    for (int i = 0; i < cfg.max_extra_chunks && near >= cfg.interaction_threshold; ++i) {
        // Stop before the fast tails reach the line ends; the caller sees an incomplete collision.
        if (boundary_probability(actual) > kLeakageWarning) break;
        actual = evolve_2p(actual, chunk, cfg.tol, &ev_actual).state;
        T += chunk;
        near = interaction_region_probability(actual);
    }
    const auto fin = evolve_2p(actual, 0.0, cfg.tol, &ev_actual);
    const auto ref = evolve_2p(reference, T, cfg.tol, &ev_free);

    const auto m = extract_phase(fin.state, ref.state, cfg.channel, cfg.interaction_threshold);
    CollisionResult r;
    r.L = L;
    r.line_length = N;
    r.duration = T;
    r.theta_measured = m.theta;
    r.theta_analytic = analytic_channel_phase(cfg.model, kin, cfg.channel);
    r.phase_error = std::abs(wrap_phase(r.theta_measured - r.theta_analytic));
    r.overlap = m.overlap;
    r.deficit = 1.0 - m.overlap;
    r.interaction_probability = near;
    r.leakage = fin.leakage;
    r.leakage_warning = fin.leakage_warning;
    return r;
}

// ---------------------------------------------------------------------------
// Transmission in one spin channel

/**
 * Spin-channel dynamics of two distinguishable particles on a line of N
 * sites (grid x1 * N + x2) with the channel's potential; the hard core
 * removes the diagonal. Particle 1 starts on the left, so the transmitted
 * probability is the weight with x1 > x2 once the packets have separated.
 */
struct TransmissionResult {
    double transmitted = 0.0;
    double reflected = 0.0;
    double analytic = 0.0;  // closed-form |T|^2 for the channel
    double duration = 0.0;
};

inline TransmissionResult channel_transmission(const CollisionConfig& cfg) {
    RelativeKinematics kin(cfg.k1, cfg.k2);
    if (!kin.approaching()) throw ConfigError("packets do not approach: need 2 sin k1 > 2 sin k2");
    const std::size_t N = cfg.effective_line_length();
    const std::size_t L = cfg.L;
    const bool hard = cfg.model.hard_core();
    double v_nn = 0.0, v_onsite = 0.0;
    switch (cfg.model.model) {
        case Model::TJ: v_nn = cfg.channel == spin::S ? -cfg.model.J : 0.0; break;
        case Model::XXZ: v_nn = xxz_channel_potentials(cfg.model.Jx, cfg.model.Jz)[static_cast<std::size_t>(cfg.channel)]; break;
        case Model::Hubbard: v_onsite = cfg.channel == spin::S ? cfg.model.U : 0.0; break;
    }
    if (!hard && cfg.channel != spin::S)
        throw ConfigError("triplet channels of the Hubbard model are free fermions; use the singlet");

    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    auto id = [N](std::size_t x, std::size_t y) { return x * N + y; };
    for (std::size_t x = 0; x < N; ++x)
        for (std::size_t y = 0; y < N; ++y) {
            if (hard && x == y) continue;
            const std::size_t i = id(x, y);
            auto hop = [&](std::size_t X, std::size_t Y) {
                if (hard && X == Y) return;
                trip.emplace_back(i, id(X, Y), -cfg.model.t);
            };
            if (x + 1 < N) hop(x + 1, y);
            if (x > 0) hop(x - 1, y);
            if (y + 1 < N) hop(x, y + 1);
            if (y > 0) hop(x, y - 1);
            if (x == y && v_onsite != 0.0) trip.emplace_back(i, i, v_onsite);
            if ((x + 1 == y || y + 1 == x) && v_nn != 0.0) trip.emplace_back(i, i, v_nn);
        }
    const auto h = CsrMatrix::from_triplets(N * N, std::move(trip));

    const std::size_t a1 = N / 2 - L - L / 2, a2 = N / 2 + L / 2;
    std::vector<std::size_t> s1(L), s2(L);
    for (std::size_t i = 0; i < L; ++i) {
        s1[i] = a1 + i;
        s2[i] = a2 + i;
    }
    const auto f1 = packet_on_sites(N, s1, kin.k1(), cfg.shape);
    const auto f2 = packet_on_sites(N, s2, kin.k2(), cfg.shape);
    CVector psi(N * N, 0.0);
    for (auto x : s1)
        for (auto y : s2) psi[id(x, y)] = f1[x] * f2[y];

    ChebyshevPropagator prop(h);
    const double dv = kin.closing_velocity(cfg.model.t);
    const double chunk = static_cast<double>(L) / dv;
    double T = 4.0 * chunk;
    psi = prop.apply(psi, T, cfg.tol);
    auto near_prob = [&] {
        double p = 0;
        for (std::size_t x = 0; x < N; ++x)
            for (std::size_t y = (x >= 2 ? x - 2 : 0); y < std::min(N, x + 3); ++y) p += std::norm(psi[id(x, y)]);
        return p;
    };
    for (int i = 0; i < cfg.max_extra_chunks && near_prob() >= cfg.interaction_threshold; ++i) {
        psi = prop.apply(psi, chunk, cfg.tol);
        T += chunk;
    }
    TransmissionResult r;
    r.duration = T;
    for (std::size_t x = 0; x < N; ++x)
        for (std::size_t y = 0; y < N; ++y) {
            if (x > y) r.transmitted += std::norm(psi[id(x, y)]);
            if (x < y) r.reflected += std::norm(psi[id(x, y)]);
        }
    if (cfg.model.model == Model::Hubbard) r.analytic = hubbard_transmission_probability(kin, cfg.model.U);
    return r;
}

// ---------------------------------------------------------------------------
// Finite-L scaling

struct ScalingStudy {
    std::vector<CollisionResult> rows;
    bool deficit_decreasing = false;
    bool phase_error_decreasing = false;
    double deficit_slope = 0.0;  // least-squares slope of log(deficit) vs log(L)
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline ScalingStudy scaling_study(const CollisionConfig& base, const std::vector<std::size_t>& L_list) {
    if (L_list.size() < 3) throw ConfigError("scaling study needs at least 3 packet lengths");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (L_list[i] <= L_list[i - 1]) throw ConfigError("packet lengths must be strictly ascending");
    ScalingStudy s;
    std::vector<double> xs, ys;
    for (auto L : L_list) {
        CollisionConfig c = base;
        c.L = L;
        s.rows.push_back(run_collision(c));
        xs.push_back(static_cast<double>(L));
        ys.push_back(std::max(s.rows.back().deficit, 1e-300));
    }
    s.deficit_decreasing = true;
    s.phase_error_decreasing = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        if (!(s.rows[i].deficit < s.rows[i - 1].deficit)) s.deficit_decreasing = false;
        if (!(s.rows[i].phase_error < s.rows[i - 1].phase_error)) s.phase_error_decreasing = false;
    }
    s.deficit_slope = loglog_slope(xs, ys);
    return s;
}

// ---------------------------------------------------------------------------
// The two-collision gate G on four momentum switches

/// Group delay d(arg S_{out,in})/dk in sites: the extra path length a packet
/// of momentum k sees between the two terminals.
inline double group_delay(const ScatterGraph& sw, std::size_t out, std::size_t in, double k, double t = 1.0) {
    const double h = 1e-5;
    const cplx a = s_matrix(sw, Momentum(k + h), t)(out, in);
    const cplx b = s_matrix(sw, Momentum(k - h), t)(out, in);
    return std::arg(a / b) / (2 * h);
}

struct GateGConfig {
    ModelParams model = ModelParams::tj(2.0);
    double k_a = std::numbers::pi / 4;  // momentum entering on rail A (switch terminal 1)
    double k_b = std::numbers::pi / 2;  // momentum entering on rail B (switch terminal 2)
    std::size_t L = 16;
    PacketShape shape = PacketShape::Square;
    double tol = 1e-12;
    // The switch passband is narrow (1 - |S|^2 ~ 25 dk^2), so at small L only a
    // fraction of each packet is routed. Phases are read from that fraction.
    double min_routed = 0.05;
};

struct GateGLayout {
    std::shared_ptr<const ScatterGraph> graph;
    std::vector<std::size_t> input_a, input_b;    // rail sites, nearest to the terminal first
    std::vector<std::size_t> output_a, output_b;  // rail sites, nearest to the terminal first
    std::size_t segment_left = 0, segment_right = 0;  // collision point distances a, b
    std::size_t connector_a = 0, connector_b = 0;     // connector vertex counts
    double duration = 0.0;
    double expected_exit_time = 0.0;
    double v_a = 0.0, v_b = 0.0;
};

/**
 * Lays out G: switches S1..S4, packets A (k_a into S1 terminal 1) and B (k_b
 * into S2 terminal 2). Segment 1 joins the terminal-3 vertices of S1 and S2,
 * connector A joins S1.t2 to S3.t2, connector B joins S2.t1 to S4.t1 and
 * segment 2 joins S3.t3 to S4.t3. Outputs leave from S3.t1 (A) and S4.t2 (B).
 * Lengths are chosen from group delays so both collisions happen at matching
 * points and the packets exit together. Rail A vertices precede rail B
 * vertices, so vertex order matches the (A, B) spin order at both ends.
 */
inline GateGLayout layout_gate_G(const ScatterGraph& sw, const GateGConfig& cfg) {
    const double t = cfg.model.t;
    const std::size_t L = cfg.L;
    const double pi4 = std::numbers::pi / 4, pi2 = std::numbers::pi / 2;
    const double va = 2 * t * std::sin(pi4), vb = 2 * t * std::sin(pi2);
    // Delays through a switch at the design momenta (reciprocal: S_ij = S_ji).
    const double dA = group_delay(sw, 2, 0, pi4, t);  // 1 <-> 3 at pi/4
    const double dB = group_delay(sw, 2, 1, pi2, t);  // 2 <-> 3 at pi/2

    // Collision point splits terminal-to-terminal distance S = a + b (bonds):
    // (dA + a) / va = (dB + b) / vb.
    const double margin = static_cast<double>(L) + 8.0;
    double S = 2.0 * margin;
    std::size_t a = 0, b = 0;
    for (;; S += 1.0) {
        const double ad = (va * (dB + S) - vb * dA) / (va + vb);
        a = static_cast<std::size_t>(std::llround(ad));
        if (ad >= margin && S - static_cast<double>(a) >= margin) {
            b = static_cast<std::size_t>(S) - a;
            break;
        }
    }
    // Middle leg: (2a + 2 dB + cA) / vb = (2b + 2 dA + cB) / va, in bonds.
    double cA = 0, cB = 2;
    cA = vb * (2.0 * static_cast<double>(b) + 2.0 * dA + cB) / va - 2.0 * static_cast<double>(a) - 2.0 * dB;
    if (cA < 2) {
        cA = 2;
        cB = va * (2.0 * static_cast<double>(a) + 2.0 * dB + cA) / vb - 2.0 * static_cast<double>(b) - 2.0 * dA;
    }
    const auto bondsA = static_cast<std::size_t>(std::llround(cA));
    const auto bondsB = static_cast<std::size_t>(std::llround(cB));

    // Starting distances give equal entry times: cpos_a / va = cpos_b / vb.
    const double start_a = static_cast<double>(L) / 2.0 + 6.0;
    const double start_b = start_a * vb / va;
    const double exit_time = (start_a + dA + static_cast<double>(a)) / va +
                             (2.0 * static_cast<double>(a) + 2.0 * dB + static_cast<double>(bondsA)) / vb +
                             (static_cast<double>(a) + dA) / va;
    const double out_travel = static_cast<double>(L) / 2.0 + 12.0;  // packet centre this far past the exit
    const double duration = exit_time + out_travel / std::min(va, vb);

    GraphBuilder gb;
    const std::size_t s1 = gb.add_graph(sw), s3 = gb.add_graph(sw);
    const std::size_t s2 = gb.add_graph(sw), s4 = gb.add_graph(sw);
    auto term = [&](std::size_t off, int j) { return off + sw.terminals()[static_cast<std::size_t>(j)]; };
    auto join = [&](std::size_t u, std::size_t v, std::size_t bonds) {
        const auto p = gb.add_path(bonds - 1);
        if (p.empty()) {
            gb.connect(u, v);
            return;
        }
        gb.connect(u, p.front());
        gb.connect(p.back(), v);
    };
    join(term(s1, 2), term(s2, 2), a + b);
    join(term(s3, 2), term(s4, 2), a + b);
    join(term(s1, 1), term(s3, 1), bondsA);
    join(term(s2, 0), term(s4, 0), bondsB);

    const auto in_len_a = static_cast<std::size_t>(std::ceil(start_a + L / 2.0 + 6.0));
    const auto in_len_b = static_cast<std::size_t>(std::ceil(start_b + L / 2.0 + 6.0));
    const auto out_len = static_cast<std::size_t>(std::ceil(out_travel + L + 24.0));
    GateGLayout lay;
    auto rail = [&](std::size_t terminal, std::size_t len) {
        auto p = gb.add_path(len);
        gb.connect(terminal, p.front());
        return p;
    };
    lay.input_a = rail(term(s1, 0), in_len_a);
    lay.output_a = rail(term(s3, 0), out_len);
    lay.input_b = rail(term(s2, 1), in_len_b);
    lay.output_b = rail(term(s4, 1), out_len);
    lay.graph = std::make_shared<const ScatterGraph>(gb.build());
    lay.segment_left = a;
    lay.segment_right = b;
    lay.connector_a = bondsA - 1;
    lay.connector_b = bondsB - 1;
    lay.duration = duration;
    lay.expected_exit_time = exit_time;
    lay.v_a = va;
    lay.v_b = vb;
    return lay;
}

struct GateGEstimate {
    PhaseGate estimate;            // measured diagonal, relative to the T+ output
    PhaseGate expected;            // gate_g(model)^2 (XXZ: with the T+- phase factored out)
    std::array<double, 4> column_norm{};  // |m_ch|: surviving amplitude relative to T+
    double max_offdiagonal = 0.0;  // weight a channel input leaves in other channels
    double routed_probability = 0.0;  // T+ run: probability on both output rails
    bool routed = false;
    double exit_spread_sites = 0.0;
    double leakage = 0.0;
    std::string diagnostic;
    GateGLayout layout;
};

/**
 * Runs the four coupled spin inputs through G and estimates the 4x4 spin
 * gate from the outputs. The T+ output's spatial function is the reference:
 * m_ch = <w|psi_ch> / <w|w> on the channel components. A packet pair that
 * does not reach both outputs is reported as a routing failure.
 */
inline GateGEstimate simulate_gate_G(const ScatterGraph& sw, const GateGConfig& cfg, bool swap_momenta = false) {
    if (sw.terminals().size() != 3) throw ConfigError("G needs a 3-terminal switch");
    GateGEstimate est;
    est.layout = layout_gate_G(sw, cfg);
    const auto& lay = est.layout;
    const auto& g = lay.graph;
    const std::size_t n = g->vertex_count();

    const double ka = swap_momenta ? cfg.k_b : cfg.k_a;
    const double kb = swap_momenta ? cfg.k_a : cfg.k_b;
    const auto start_a = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.L) / 2.0 + 6.0));
    const auto start_b = static_cast<std::size_t>(std::llround(static_cast<double>(start_a) * lay.v_b / lay.v_a));
    auto rail_packet_sites = [&](const std::vector<std::size_t>& rail, std::size_t centre) {
        // Far to near, so e^{ikx} moves toward the switch.
        std::vector<std::size_t> s;
        const std::size_t first = centre - cfg.L / 2;
        for (std::size_t i = 0; i < cfg.L; ++i) s.push_back(rail[first + cfg.L - 1 - i]);
        return s;
    };
    const auto fa = packet_on_sites(n, rail_packet_sites(lay.input_a, start_a - 1), Momentum(ka), cfg.shape);
    const auto fb = packet_on_sites(n, rail_packet_sites(lay.input_b, start_b - 1), Momentum(kb), cfg.shape);

    std::vector<std::size_t> boundary;
    for (const auto* r : {&lay.input_a, &lay.input_b, &lay.output_a, &lay.output_b})
        for (std::size_t i = r->size() - 4; i < r->size(); ++i) boundary.push_back((*r)[i]);

    std::array<TwoParticleWavefunction, 4> out;
    std::optional<TwoParticleEvolver> ev_by_sector[3];
    for (int ch = 0; ch < 4; ++ch) {
        auto wf = prepare_two_packets(g, fa, fb, coupled_spin(ch), cfg.model);
        wf.boundary = boundary;
        const int sector = *spin_sector(coupled_spin(ch)) / 2 + 1;
        auto& ev = ev_by_sector[sector];
        if (!ev) ev.emplace(*g, cfg.model, wf.basis);
        // Each sector's basis is rebuilt identically, so the evolver's basis matches.
        // Switch reflections are expected to reach the input rail ends, so the
        // boundary weight is reported rather than treated as fatal.
        TwoParticleWavefunction r = wf;
        r.amplitudes = ev->evolve(wf.amplitudes, lay.duration, cfg.tol);
        est.leakage = std::max(est.leakage, boundary_probability(r));
        out[static_cast<std::size_t>(ch)] = std::move(r);
    }

    // Routing: probability with one particle on each output rail.
    std::vector<char> on_a(n, 0), on_b(n, 0);
    for (auto v : lay.output_a) on_a[v] = 1;
    for (auto v : lay.output_b) on_b[v] = 1;
    const auto& tp = out[spin::TPlus];
    std::vector<double> dist_a(n, 0.0), dist_b(n, 0.0);
    for (std::size_t i = 0; i < lay.output_a.size(); ++i) dist_a[lay.output_a[i]] = static_cast<double>(i + 1);
    for (std::size_t i = 0; i < lay.output_b.size(); ++i) dist_b[lay.output_b[i]] = static_cast<double>(i + 1);
    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < tp.basis->size(); ++i) {
        const auto s = tp.basis->state(i);
        const double w = std::norm(tp.amplitudes[i]);
        const std::size_t x = s.site1(), y = s.site2();
        if ((on_a[x] && on_b[y]) || (on_a[y] && on_b[x])) {
            est.routed_probability += w;
            mean_a += w * (on_a[x] ? dist_a[x] : dist_a[y]);
            mean_b += w * (on_b[y] ? dist_b[y] : dist_b[x]);
        }
    }
    est.routed = est.routed_probability > cfg.min_routed;
    est.expected = gate_power(cfg.model.model == Model::XXZ ? gate_g_xxz(RelativeKinematics::head_on(cfg.k_a, cfg.k_b), cfg.model.Jx, cfg.model.Jz).gate
                                                             : gate_g(cfg.model.model, RelativeKinematics::head_on(cfg.k_a, cfg.k_b), cfg.model.coupling()),
                              2);
    if (!est.routed) {
        est.diagnostic = "routing failure: only " + std::to_string(est.routed_probability) +
                         " of the probability reaches the two output rails";
        return est;
    }
    mean_a /= est.routed_probability;
    mean_b /= est.routed_probability;
    const double exit_a = lay.duration - mean_a / lay.v_a;
    const double exit_b = lay.duration - mean_b / lay.v_b;
    est.exit_spread_sites = std::abs(exit_a - exit_b) * 0.5 * (lay.v_a + lay.v_b);

    // Reference spatial function: the T+ output. Zero it outside the output rails.
    auto restrict_outputs = [&](CVector v) {
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x; y < n; ++y)
                if (!((on_a[x] && on_b[y]) || (on_a[y] && on_b[x]))) v[x * n + y] = 0.0;
        return v;
    };
    const auto w = restrict_outputs(channel_amplitudes(*tp.basis, tp.amplitudes, spin::TPlus));
    const double ww = inner(w, w).real();
    for (int ch = 0; ch < 4; ++ch) {
        const auto& o = out[static_cast<std::size_t>(ch)];
        for (int c2 = 0; c2 < 4; ++c2) {
            const auto comp = restrict_outputs(channel_amplitudes(*o.basis, o.amplitudes, c2));
            const cplx m = inner(w, comp) / ww;
            if (c2 == ch) {
                est.estimate.diag[static_cast<std::size_t>(ch)] = m / std::abs(m);
                est.column_norm[static_cast<std::size_t>(ch)] = std::abs(m);
            } else {
                est.max_offdiagonal = std::max(est.max_offdiagonal, std::abs(m));
            }
        }
    }
    if (est.exit_spread_sites > static_cast<double>(cfg.L) / 2.0) {
        est.diagnostic = "timing misalignment: exit spread " + std::to_string(est.exit_spread_sites) + " sites";
    }
    return est;
}

}  // namespace scatterlab
