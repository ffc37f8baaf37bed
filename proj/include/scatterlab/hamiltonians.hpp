#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/graph.hpp"
#include "scatterlab/sparse.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace scatterlab {

enum class Model { TJ, Hubbard, XXZ };

inline std::string to_string(Model m) {
    switch (m) {
        case Model::TJ: return "tj";
        case Model::Hubbard: return "hubbard";
        case Model::XXZ: return "xxz";
    }
    return "?";
}

inline Model model_from_string(const std::string& s) {
    if (s == "tj") return Model::TJ;
    if (s == "hubbard") return Model::Hubbard;
    if (s == "xxz") return Model::XXZ;
    throw ConfigError("unsupported model '" + s + "' (expected tj, hubbard or xxz)");
}

struct ModelParams {
    Model model = Model::TJ;
    double t = 1.0;
    double J = 0.0;
    double U = 0.0;
    double Jx = 0.0;
    double Jz = 0.0;

    static ModelParams tj(double J, double t = 1.0) { return {Model::TJ, t, J, 0.0, 0.0, 0.0}; }
    static ModelParams hubbard(double U, double t = 1.0) { return {Model::Hubbard, t, 0.0, U, 0.0, 0.0}; }
    static ModelParams xxz(double Jx, double Jz, double t = 1.0) { return {Model::XXZ, t, 0.0, 0.0, Jx, Jz}; }

    /// Exchange coupling of the strong-coupling limit, J = 4 t^2 / U.
    double J_from_U() const {
        if (U == 0.0) throw ConfigError("J = 4t^2/U needs U != 0");
        return 4.0 * t * t / U;
    }

    /// The model's single coupling for scalar sweeps (J, U or Jx).
    double coupling() const {
        switch (model) {
            case Model::TJ: return J;
            case Model::Hubbard: return U;
            case Model::XXZ: return Jx;
        }
        return 0.0;
    }

    /// Hard-core constraint (no double occupancy) applies to t-J and XXZ.
    bool hard_core() const { return model != Model::Hubbard; }
};

enum class BasisTag { OneParticle, TwoParticleTJ, TwoParticleHubbard, TwoParticleXXZ };

inline BasisTag basis_tag_for(Model m) {
    switch (m) {
        case Model::TJ: return BasisTag::TwoParticleTJ;
        case Model::Hubbard: return BasisTag::TwoParticleHubbard;
        case Model::XXZ: return BasisTag::TwoParticleXXZ;
    }
    return BasisTag::TwoParticleTJ;
}

struct SparseHamiltonian {
    std::size_t dimension = 0;
    CsrMatrix entries;
    BasisTag basis_tag = BasisTag::OneParticle;
};

// ---------------------------------------------------------------------------
// Two-spin states

enum class SpinBasis { Uncoupled, Coupled };

/// Index helpers. Uncoupled order {uu, ud, du, dd}; coupled order {T+, T0, S, T-}.
namespace spin {
inline constexpr int UU = 0, UD = 1, DU = 2, DD = 3;
inline constexpr int TPlus = 0, T0 = 1, S = 2, TMinus = 3;
}  // namespace spin

struct SpinHalfPairState {
    std::array<cplx, 4> amplitudes{};
    SpinBasis basis = SpinBasis::Uncoupled;

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
};

/// Change of basis between {uu, ud, du, dd} and {T+, T0, S, T-}. The matrix is
/// real, symmetric and orthogonal, hence its own inverse.
inline SpinHalfPairState coupled_uncoupled(const SpinHalfPairState& s, SpinBasis target) {
    if (s.basis == target) return s;
    const double r = 1.0 / std::sqrt(2.0);
    const auto& a = s.amplitudes;
    SpinHalfPairState out;
    out.basis = target;
    out.amplitudes = {a[0], r * (a[1] + a[2]), r * (a[1] - a[2]), a[3]};
    return out;
}

using SpinMatrix = std::array<std::array<double, 4>, 4>;

/// S1.S2 in the uncoupled basis.
inline SpinMatrix spin_dot_matrix() {
    SpinMatrix m{};
    m[spin::UU][spin::UU] = 0.25;
    m[spin::DD][spin::DD] = 0.25;
    m[spin::UD][spin::UD] = -0.25;
    m[spin::DU][spin::DU] = -0.25;
    m[spin::UD][spin::DU] = 0.5;
    m[spin::DU][spin::UD] = 0.5;
    return m;
}

/// Nearest-neighbour spin interaction of the hard-core models, uncoupled basis.
///   t-J: J (S1.S2 - 1/4), which is -J on the singlet and 0 on the triplets.
///   XXZ: Jx (Sx Sx + Sy Sy) + Jz Sz Sz.
inline SpinMatrix neighbour_interaction(const ModelParams& p) {
    SpinMatrix m{};
    if (p.model == Model::TJ) {
        const auto sd = spin_dot_matrix();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] = p.J * (sd[i][j] - (i == j ? 0.25 : 0.0));
    } else if (p.model == Model::XXZ) {
        m[spin::UU][spin::UU] = 0.25 * p.Jz;
        m[spin::DD][spin::DD] = 0.25 * p.Jz;
        m[spin::UD][spin::UD] = -0.25 * p.Jz;
        m[spin::DU][spin::DU] = -0.25 * p.Jz;
        m[spin::UD][spin::DU] = 0.5 * p.Jx;
        m[spin::DU][spin::UD] = 0.5 * p.Jx;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Two-fermion basis

/**
 * Antisymmetrized two-fermion basis on n_sites sites. A single-particle mode
 * is m = 2*site + spin (spin 0 = up, 1 = down) and a basis state is the pair
 * m1 < m2, standing for c+_{m1} c+_{m2}|0>. For different sites (x < y) the
 * pair (2x+s, 2y+u) carries the position-ordered spin state |s u>; the only
 * same-site state is c+_{x,up} c+_{x,down}|0>, a spin singlet.
 *
 * Hard-core bases drop the same-site states entirely. An optional 2*Sz value
 * restricts the basis to one magnetization sector.
 */
class TwoParticleBasis {
public:
    struct State {
        std::uint32_t m1, m2;
        std::size_t site1() const { return m1 / 2; }
        std::size_t site2() const { return m2 / 2; }
        int spin1() const { return static_cast<int>(m1 % 2); }
        int spin2() const { return static_cast<int>(m2 % 2); }
        bool same_site() const { return site1() == site2(); }
        /// Uncoupled spin index (2*s1 + s2) in position order.
        int spin_index() const { return 2 * spin1() + spin2(); }
    };

    TwoParticleBasis(std::size_t n_sites, bool hard_core, std::optional<int> two_sz = std::nullopt)
        : n_sites_(n_sites), hard_core_(hard_core), two_sz_(two_sz) {
        const std::size_t modes = 2 * n_sites_;
        if (modes * modes > (std::size_t{1} << 31)) throw ConfigError("two-particle basis too large");
        lookup_.assign(modes * modes, -1);
        for (std::uint32_t m1 = 0; m1 < modes; ++m1) {
            for (std::uint32_t m2 = m1 + 1; m2 < modes; ++m2) {
                const State s{m1, m2};
                if (hard_core_ && s.same_site()) continue;
                if (two_sz_ && two_sz_of(s) != *two_sz_) continue;
                lookup_[m1 * modes + m2] = static_cast<std::int32_t>(states_.size());
                states_.push_back(s);
            }
        }
    }

    std::size_t size() const { return states_.size(); }
    std::size_t n_sites() const { return n_sites_; }
    bool hard_core() const { return hard_core_; }
    std::optional<int> two_sz() const { return two_sz_; }
    const State& state(std::size_t i) const { return states_[i]; }
    const std::vector<State>& states() const { return states_; }

    /// Index of c+_{a} c+_{b}|0> (a < b), or -1 when excluded from the basis.
    std::int64_t index_of_modes(std::uint32_t a, std::uint32_t b) const {
        if (a >= b || b >= 2 * n_sites_) return -1;
        return lookup_[a * 2 * n_sites_ + b];
    }

    static int two_sz_of(const State& s) { return (s.spin1() == 0 ? 1 : -1) + (s.spin2() == 0 ? 1 : -1); }

private:
    std::size_t n_sites_;
    bool hard_core_;
    std::optional<int> two_sz_;
    std::vector<State> states_;
    std::vector<std::int32_t> lookup_;
};

// ---------------------------------------------------------------------------
// Hamiltonian builders

/// H1 = -t A on the position space; spin is a spectator in the one-particle sector.
inline SparseHamiltonian one_particle_h(const ScatterGraph& g, double t) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    for (auto [u, v] : g.edges()) {
        trip.emplace_back(u, v, -t);
        trip.emplace_back(v, u, -t);
    }
    return {g.vertex_count(), CsrMatrix::from_triplets(g.vertex_count(), std::move(trip)), BasisTag::OneParticle};
}

inline SparseHamiltonian one_particle_h(const RailedGraph& g, double t) { return one_particle_h(g.graph(), t); }

/**
 * Two-particle Hamiltonian on g in the given basis:
 *   hopping   -t sum_sigma (c+_i c_j + h.c.) over edges, fermionic signs from mode ordering;
 *   t-J       J (S_i.S_j - n_i n_j / 4) on neighbouring occupied sites;
 *   XXZ       Jx (SxSx + SySy) + Jz SzSz on neighbouring occupied sites;
 *   Hubbard   U on doubly occupied sites.
 * Hard-core models must use a hard-core basis: hops into double occupancy are dropped.
 */
inline SparseHamiltonian two_particle_h(const ScatterGraph& g, const ModelParams& p, const TwoParticleBasis& basis) {
    if (basis.n_sites() != g.vertex_count()) throw ConfigError("basis and graph sizes differ");
    if (p.hard_core() != basis.hard_core())
        throw ConfigError("model " + to_string(p.model) + " needs a " + (p.hard_core() ? "hard-core" : "full") + " basis");

    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    trip.reserve(basis.size() * (2 * g.max_degree() + 2));
    const SpinMatrix v_nn = neighbour_interaction(p);

    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto s = basis.state(i);
        const std::uint32_t modes[2] = {s.m1, s.m2};
        for (int slot = 0; slot < 2; ++slot) {
            const std::uint32_t moving = modes[slot];
            const std::uint32_t other = modes[1 - slot];
            const std::uint32_t sigma = moving % 2;
            for (std::size_t y : g.neighbors(moving / 2)) {
                const auto target = static_cast<std::uint32_t>(2 * y + sigma);
                if (target == other) continue;
                // Replace the mode in its slot, then restore ascending order.
                std::uint32_t a = slot == 0 ? target : other;
                std::uint32_t b = slot == 0 ? other : target;
                double sign = 1.0;
                if (a > b) {
                    std::swap(a, b);
                    sign = -1.0;
                }
                const auto j = basis.index_of_modes(a, b);
                if (j < 0) continue;
                trip.emplace_back(static_cast<std::size_t>(j), i, -p.t * sign);
            }
        }

        if (s.same_site()) {
            if (p.model == Model::Hubbard && p.U != 0.0) trip.emplace_back(i, i, p.U);
            continue;
        }
        if (p.model == Model::Hubbard) continue;
        const std::size_t x = s.site1(), y = s.site2();
        if (!g.adjacent(x, y)) continue;
        const int col = s.spin_index();
        for (int row = 0; row < 4; ++row) {
            const double v = v_nn[row][col];
            if (v == 0.0) continue;
            const auto a = static_cast<std::uint32_t>(2 * x + row / 2);
            const auto b = static_cast<std::uint32_t>(2 * y + row % 2);
            const auto j = basis.index_of_modes(a, b);
            if (j < 0) continue;  // other Sz sector
            trip.emplace_back(static_cast<std::size_t>(j), i, v);
        }
    }
    return {basis.size(), CsrMatrix::from_triplets(basis.size(), std::move(trip)), basis_tag_for(p.model)};
}

inline SparseHamiltonian two_particle_h(const ScatterGraph& g, const ModelParams& p) {
    return two_particle_h(g, p, TwoParticleBasis(g.vertex_count(), p.hard_core()));
}

inline SparseHamiltonian two_particle_h(const RailedGraph& g, const ModelParams& p) { return two_particle_h(g.graph(), p); }

/// Total S_z (diagonal).
inline CsrMatrix total_sz(const TwoParticleBasis& basis) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double sz = 0.5 * TwoParticleBasis::two_sz_of(basis.state(i));
        if (sz != 0.0) trip.emplace_back(i, i, sz);
    }
    return CsrMatrix::from_triplets(basis.size(), std::move(trip));
}

/// Total S^2 = 3/2 + 2 S1.S2 for separated particles, 0 for the on-site singlet.
/// Needs a basis without an Sz restriction or one closed under S1.S2 (always the case).
inline CsrMatrix total_spin_squared(const TwoParticleBasis& basis) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    const auto sd = spin_dot_matrix();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto s = basis.state(i);
        if (s.same_site()) continue;
        const int col = s.spin_index();
        for (int row = 0; row < 4; ++row) {
            const double v = 2.0 * sd[row][col] + (row == col ? 1.5 : 0.0);
            if (v == 0.0) continue;
            const auto j = basis.index_of_modes(static_cast<std::uint32_t>(2 * s.site1() + row / 2),
                                                static_cast<std::uint32_t>(2 * s.site2() + row % 2));
            if (j >= 0) trip.emplace_back(static_cast<std::size_t>(j), i, v);
        }
    }
    return CsrMatrix::from_triplets(basis.size(), std::move(trip));
}

/**
 * Spatial amplitudes of one coupled spin channel. The result is indexed by
 * x * n_sites + y with x <= y; channel amplitudes of separated pairs are the
 * coupled-basis components of the position-ordered spin state, and the
 * same-site (Hubbard) amplitude belongs to the singlet channel.
 */
inline CVector channel_amplitudes(const TwoParticleBasis& basis, std::span<const cplx> psi, int channel) {
    const std::size_t n = basis.n_sites();
    CVector out(n * n, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto s = basis.state(i);
        const std::size_t idx = s.site1() * n + s.site2();
        if (s.same_site()) {
            if (channel == spin::S) out[idx] += psi[i];
            continue;
        }
        const int u = s.spin_index();
        switch (channel) {
            case spin::TPlus: if (u == spin::UU) out[idx] += psi[i]; break;
            case spin::TMinus: if (u == spin::DD) out[idx] += psi[i]; break;
            case spin::T0: if (u == spin::UD || u == spin::DU) out[idx] += r * psi[i]; break;
            case spin::S:
                if (u == spin::UD) out[idx] += r * psi[i];
                else if (u == spin::DU) out[idx] -= r * psi[i];
                break;
            default: break;
        }
    }
    return out;
}

}  // namespace scatterlab
