#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/graph.hpp"
#include "scatterlab/hamiltonians.hpp"
#include "scatterlab/propagator.hpp"
#include "scatterlab/sparse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace scatterlab {

/// Scattering matrix between the rails of a core graph at one momentum.
/// entries(out, in) is the outgoing amplitude on rail `out` for a unit wave
/// incident on rail `in` (0-based terminal order).
struct SMatrix {
    Momentum momentum;
    Eigen::MatrixXcd entries;

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
    cplx operator()(std::size_t out, std::size_t in) const {
        return entries(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    }

    /// max |(S^dag S - I)_ij|
    double unitarity_error() const {
        const Eigen::MatrixXcd d = entries.adjoint() * entries - Eigen::MatrixXcd::Identity(entries.rows(), entries.cols());
        return d.cwiseAbs().maxCoeff();
    }
};

inline constexpr double kSingularRcond = 1e-12;

/**
 * Plane-wave scattering solution. On rail j the amplitude at distance d from
 * the terminal is delta_{j,in} e^{-ikd} + S_{j,in} e^{ikd}; the core amplitudes
 * and S follow from one linear system at E = -2t cos k.
 */
inline SMatrix s_matrix(const ScatterGraph& core, Momentum k, double t = 1.0) {
    const double kv = k.value();
    if (t == 0.0) throw ConfigError("s_matrix needs t != 0");
    if (!(k.magnitude() > 0.0 && k.magnitude() < std::numbers::pi))
        throw ConfigError("s_matrix needs 0 < |k| < pi (propagating modes)");
    const auto& terms = core.terminals();
    const auto n = static_cast<Eigen::Index>(core.vertex_count());
    const auto m = static_cast<Eigen::Index>(terms.size());
    if (m == 0) throw ConfigError("s_matrix needs at least one terminal");

    const double energy = -2.0 * t * std::cos(kv);
    const cplx eik = std::exp(cplx(0.0, kv));

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + m, n + m);
    for (Eigen::Index v = 0; v < n; ++v) {
        a(v, v) = energy;
        for (auto u : core.neighbors(static_cast<std::size_t>(v))) a(v, static_cast<Eigen::Index>(u)) += t;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto tv = static_cast<Eigen::Index>(terms[static_cast<std::size_t>(j)]);
        a(tv, n + j) += t * eik;  // outgoing part of the first rail site
        a(n + j, tv) = 1.0;       // psi(terminal) - S_j = delta_{j,in}
        a(n + j, n + j) = -1.0;
    }

    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n + m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto tv = static_cast<Eigen::Index>(terms[static_cast<std::size_t>(j)]);
        rhs(tv, j) = -t * std::conj(eik);
        rhs(n + j, j) = 1.0;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double rcond = sv(sv.size() - 1) / sv(0);
    if (!(rcond > kSingularRcond))
        throw SingularSystemError("scattering system singular at k = " + std::to_string(kv) +
                                  " (bound state or resonance; rcond = " + std::to_string(rcond) + ")");
    const Eigen::MatrixXcd x = svd.solve(rhs);
    return {k, x.bottomRows(m)};
}

struct SwitchReport {
    bool passed = false;
    std::string reason;
    double s31_low = 0.0;    // |S_31(k_low)|
    double s32_high = 0.0;   // |S_32(k_high)|
    double s21_low = 0.0;    // |S_21(k_low)|
    double s21_high = 0.0;   // |S_21(k_high)|
    double unitarity_low = 0.0;
    double unitarity_high = 0.0;
};

/// Certifies a momentum switch: perfect 1<->3 transmission at k_low, 2<->3 at
/// k_high, and no 1<->2 leakage at either. Terminals are labeled 1, 2, 3 in
/// the graph's terminal order.
inline SwitchReport verify_switch(const ScatterGraph& core, Momentum k_low, Momentum k_high, double tol = 1e-10,
                                  double t = 1.0) {
    SwitchReport r;
    if (core.terminals().size() != 3) {
        r.reason = "a switch needs exactly 3 terminals, graph has " + std::to_string(core.terminals().size());
        return r;
    }
    const SMatrix lo = s_matrix(core, k_low, t);
    const SMatrix hi = s_matrix(core, k_high, t);
    r.s31_low = std::abs(lo(2, 0));
    r.s32_high = std::abs(hi(2, 1));
    r.s21_low = std::abs(lo(1, 0));
    r.s21_high = std::abs(hi(1, 0));
    r.unitarity_low = lo.unitarity_error();
    r.unitarity_high = hi.unitarity_error();
    r.passed = r.s31_low >= 1.0 - tol && r.s32_high >= 1.0 - tol && r.s21_low <= tol && r.s21_high <= tol;
    if (!r.passed) {
        r.reason = "|S31(k_low)|=" + std::to_string(r.s31_low) + " |S32(k_high)|=" + std::to_string(r.s32_high) +
                   " |S21(k_low)|=" + std::to_string(r.s21_low) + " |S21(k_high)|=" + std::to_string(r.s21_high);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Wave packets and one-particle evolution

enum class PacketShape { Square, Gaussian };

inline PacketShape packet_shape_from_string(const std::string& s) {
    if (s == "square") return PacketShape::Square;
    if (s == "gaussian") return PacketShape::Gaussian;
    throw ConfigError("unknown packet shape '" + s + "' (expected square or gaussian)");
}

/// Envelope weights over L sites: constant for square packets, a Gaussian of
/// width L/6 centred on the window otherwise. Not normalized.
inline std::vector<double> packet_envelope(std::size_t L, PacketShape shape) {
    std::vector<double> w(L, 1.0);
    if (shape == PacketShape::Gaussian) {
        const double c = 0.5 * static_cast<double>(L - 1);
        const double sigma = static_cast<double>(L) / 6.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double x = (static_cast<double>(i) - c) / sigma;
            w[i] = std::exp(-0.5 * x * x);
        }
    }
    return w;
}

/// Packet e^{ik x} over sites[0..L) (x = position in the list), normalized.
inline CVector packet_on_sites(std::size_t dim, const std::vector<std::size_t>& sites, Momentum k,
                               PacketShape shape = PacketShape::Square) {
    if (sites.empty()) throw ConfigError("empty packet support");
    CVector psi(dim, 0.0);
    const auto env = packet_envelope(sites.size(), shape);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] >= dim) throw ConfigError("packet site out of range");
        psi[sites[i]] = env[i] * std::exp(cplx(0.0, k.value() * static_cast<double>(i)));
    }
    normalize(psi);
    return psi;
}

/// Packet of L sites on rail j, starting `offset` sites from the terminal,
/// moving toward the core (amplitude e^{-ikd} at distance d).
inline CVector rail_packet(const RailedGraph& g, std::size_t rail, Momentum k, std::size_t L, std::size_t offset,
                           PacketShape shape = PacketShape::Square) {
    if (rail >= g.rail_count()) throw ConfigError("rail index out of range");
    if (offset == 0 || offset + L - 1 > g.rail_length()) throw ConfigError("packet does not fit on the rail");
    std::vector<std::size_t> sites;
    // Listed from far to near so that e^{ik x} with x increasing toward the core.
    for (std::size_t i = 0; i < L; ++i) sites.push_back(g.rail_site(rail, offset + L - 1 - i));
    return packet_on_sites(g.vertex_count(), sites, k, shape);
}

struct Evolution1p {
    CVector psi;
    double rail_end_probability = 0.0;
    bool truncation_warning = false;
    PropagationReport propagation;
};

/// Sites counted as the far end of each rail when checking for truncation.
inline std::size_t rail_end_width(const RailedGraph& g) { return std::max<std::size_t>(1, g.rail_length() / 16); }

inline double rail_end_probability(const RailedGraph& g, std::span<const cplx> psi) {
    double p = 0.0;
    const std::size_t w = rail_end_width(g);
    for (std::size_t j = 0; j < g.rail_count(); ++j) {
        auto [b, e] = g.rail_range(j);
        for (std::size_t v = e - w; v < e; ++v) p += std::norm(psi[v]);
    }
    return p;
}

/// psi(T) = exp(-i H1 T) psi0 with H1 = -t A. Flags a warning when more than
/// 1e-3 of the probability sits at the rail ends (the truncation is felt).
inline Evolution1p evolve_1p(const RailedGraph& g, std::span<const cplx> psi0, double duration, double t = 1.0,
                             double tol = 1e-12) {
    if (psi0.size() != g.vertex_count()) throw ConfigError("state dimension does not match the graph");
    if (std::abs(norm2(psi0) - 1.0) > 1e-10) throw ConfigError("initial state must be normalized");
    if (t == 0.0) throw ConfigError("dynamics needs t != 0");
    const auto h = one_particle_h(g, t);
    ChebyshevPropagator prop(h.entries);
    Evolution1p out;
    out.psi = prop.apply(psi0, duration, tol, &out.propagation);
    out.rail_end_probability = rail_end_probability(g, out.psi);
    out.truncation_warning = out.rail_end_probability > 1e-3;
    return out;
}

/// Probability on rail j (terminal excluded).
inline double rail_probability(const RailedGraph& g, std::span<const cplx> psi, std::size_t rail) {
    auto [b, e] = g.rail_range(rail);
    double p = 0.0;
    for (std::size_t v = b; v < e; ++v) p += std::norm(psi[v]);
    return p;
}

}  // namespace scatterlab
