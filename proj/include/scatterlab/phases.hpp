#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/graph.hpp"
#include "scatterlab/hamiltonians.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace scatterlab {

inline constexpr double kSingularDenominator = 1e-12;

/// Phase in (-pi, pi].
inline double wrap_phase(double a) { return Momentum::canonical(a); }

/**
 * Two-particle kinematics. Particle 1 (momentum k1) is the one starting at
 * the smaller coordinate, so the packets approach each other when
 * 2 sin k1 > 2 sin k2. A head-on collision of a pi/4 packet from the left
 * with a pi/2 packet from the right is (k1, k2) = (pi/4, -pi/2).
 */
class RelativeKinematics {
public:
    RelativeKinematics(Momentum k1, Momentum k2) : k1_(k1), k2_(k2) {
        if (std::abs(std::cos(p1() / 2)) < kSingularDenominator)
            throw ConfigError("cos(p1/2) = 0: the relative problem degenerates");
    }
    RelativeKinematics(double k1, double k2) : RelativeKinematics(Momentum(k1), Momentum(k2)) {}

    /// Left packet with |k| = left, right packet with |k| = right, moving toward each other.
    static RelativeKinematics head_on(double left, double right) {
        return {Momentum(std::abs(left)), Momentum(-std::abs(right))};
    }

    Momentum k1() const { return k1_; }
    Momentum k2() const { return k2_; }
    double p1() const { return -(k1_.value() + k2_.value()); }
    double p2() const { return 0.5 * (k2_.value() - k1_.value()); }
    double cos_half_p1() const { return std::cos(0.5 * p1()); }

    /// Relative velocity v1 - v2; positive means the packets approach.
    double closing_velocity(double t = 1.0) const { return k1_.group_velocity(t) - k2_.group_velocity(t); }
    bool approaching() const { return closing_velocity() > 0.0; }

private:
    Momentum k1_, k2_;
};

/// 4x4 gate diagonal in the coupled basis {T+, T0, S, T-}.
struct PhaseGate {
    std::array<cplx, 4> diag{1.0, 1.0, 1.0, 1.0};

    static PhaseGate identity() { return {}; }
    static PhaseGate from_phases(double t_plus, double t0, double s, double t_minus) {
        return {{std::polar(1.0, t_plus), std::polar(1.0, t0), std::polar(1.0, s), std::polar(1.0, t_minus)}};
    }
    /// diag(1, 1, e^{i theta}, 1)
    static PhaseGate singlet(double theta) { return from_phases(0, 0, theta, 0); }

    double singlet_phase() const { return std::arg(diag[spin::S]); }

    PhaseGate operator*(const PhaseGate& o) const {
        PhaseGate r;
        for (int i = 0; i < 4; ++i) r.diag[i] = diag[i] * o.diag[i];
        return r;
    }

    /// Largest deviation of any entry from unit modulus.
    double unimodularity_error() const {
        double e = 0;
        for (const auto& d : diag) e = std::max(e, std::abs(std::abs(d) - 1.0));
        return e;
    }

    /// The gate as a 4x4 matrix in the uncoupled basis {uu, ud, du, dd}.
    Eigen::Matrix4cd uncoupled_matrix() const {
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        const double r = 1.0 / std::sqrt(2.0);
        m(0, 0) = 1;
        m(1, 1) = r;
        m(1, 2) = r;
        m(2, 1) = r;
        m(2, 2) = -r;
        m(3, 3) = 1;
        Eigen::Matrix4cd d = Eigen::Matrix4cd::Zero();
        for (int i = 0; i < 4; ++i) d(i, i) = diag[static_cast<std::size_t>(i)];
        return m.cast<cplx>() * d * m.cast<cplx>();
    }

    /// Sup-norm distance between diagonals.
    double distance(const PhaseGate& o) const {
        double e = 0;
        for (int i = 0; i < 4; ++i) e = std::max(e, std::abs(diag[i] - o.diag[i]));
        return e;
    }
};

/// G^k, elementwise on the diagonal (k = 0 gives the identity).
inline PhaseGate gate_power(const PhaseGate& g, long long k) {
    if (k < 0) throw ConfigError("gate power must be non-negative");
    PhaseGate r;
    for (int i = 0; i < 4; ++i) {
        // Power through the phase keeps |entries| exactly 1 for large k.
        const double a = std::arg(g.diag[i]);
        r.diag[i] = std::polar(1.0, std::fmod(a * static_cast<double>(k), 2.0 * std::numbers::pi));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Closed forms

/**
 * Relative-coordinate reflection off a hard core with a nearest-neighbour
 * potential V (s = 1), for a symmetric spatial wavefunction:
 *   R(V) = -e^{2ip2} (V + 2c e^{-ip2}) / (V + 2c e^{ip2}),  c = cos(p1/2).
 * The t-J singlet sees V = -J; antisymmetric channels pick up an extra -1.
 */
inline cplx hard_core_reflection(const RelativeKinematics& kin, double V) {
    const double c = kin.cos_half_p1();
    const cplx ep = std::exp(cplx(0.0, kin.p2()));
    const cplx den = V + 2.0 * c * ep;
    if (std::abs(den) < kSingularDenominator)
        throw SingularSystemError("reflection denominator vanishes (V = " + std::to_string(V) + ")");
    return -ep * ep * (V + 2.0 * c * std::conj(ep)) / den;
}

struct Amplitudes {
    cplx R;
    cplx T;
};

/// t-J singlet channel: T = 0 and
/// R = -e^{2ip2} (J - 2cos(p1/2) e^{-ip2}) / (J - 2cos(p1/2) e^{ip2}).
inline Amplitudes tj_reflection(const RelativeKinematics& kin, double J) {
    const double c = kin.cos_half_p1();
    const cplx ep = std::exp(cplx(0.0, kin.p2()));
    const cplx den = J - 2.0 * c * ep;
    if (std::abs(den) < kSingularDenominator)
        throw SingularSystemError("t-J reflection denominator vanishes at J = " + std::to_string(J));
    return {-ep * ep * (J - 2.0 * c * std::conj(ep)) / den, 0.0};
}

/// Dilute Hubbard singlet channel: T + R = 1 - 2U / (U + 4i cos(p1/2) sin(p2)).
inline cplx hubbard_phase(const RelativeKinematics& kin, double U) {
    const cplx den = U + cplx(0.0, 4.0 * kin.cos_half_p1() * std::sin(kin.p2()));
    if (std::abs(den) < kSingularDenominator)
        throw SingularSystemError("Hubbard denominator vanishes at U = " + std::to_string(U));
    return 1.0 - 2.0 * U / den;
}

/// Transmission probability of the dilute Hubbard singlet channel,
/// |T|^2 = (4c sin p2)^2 / ((4c sin p2)^2 + U^2).
inline double hubbard_transmission_probability(const RelativeKinematics& kin, double U) {
    const double w = 4.0 * kin.cos_half_p1() * std::sin(kin.p2());
    if (w * w + U * U < kSingularDenominator) throw SingularSystemError("Hubbard transmission undefined");
    return w * w / (w * w + U * U);
}

/// Coupled-channel potentials of the XXZ nearest-neighbour term {T+, T0, S, T-}.
inline std::array<double, 4> xxz_channel_potentials(double Jx, double Jz) {
    return {0.25 * Jz, 0.5 * Jx - 0.25 * Jz, -0.5 * Jx - 0.25 * Jz, 0.25 * Jz};
}

struct XxzGate {
    PhaseGate gate;         // diag(1, e^{i theta1}, e^{i theta2}, 1)
    double theta1 = 0.0;
    double theta2 = 0.0;
    double global_phase = 0.0;  // phase of the T+/T- channels, factored out
    std::array<cplx, 4> channel_amplitudes{};  // per-channel ratio to free propagation
};

/**
 * XXZ collision gate. Each coupled channel reflects off the hard core with
 * its own nearest-neighbour potential; the T+- phase is factored out as a
 * global phase so the corners of the diagonal are exactly 1.
 */
inline XxzGate gate_g_xxz(const RelativeKinematics& kin, double Jx, double Jz) {
    const auto v = xxz_channel_potentials(Jx, Jz);
    XxzGate out;
    for (int i = 0; i < 4; ++i) {
        const cplx r = hard_core_reflection(kin, v[static_cast<std::size_t>(i)]);
        out.channel_amplitudes[static_cast<std::size_t>(i)] = (i == spin::S) ? r : -r;
    }
    const cplx ref = out.channel_amplitudes[spin::TPlus];
    out.global_phase = std::arg(ref);
    out.theta1 = std::arg(out.channel_amplitudes[spin::T0] / ref);
    out.theta2 = std::arg(out.channel_amplitudes[spin::S] / ref);
    out.gate = PhaseGate::from_phases(0, out.theta1, out.theta2, 0);
    return out;
}

/// Collision gate g for t-J (theta = Arg R) or Hubbard (theta = Arg(T+R)).
/// For XXZ, `coupling` is Jx = Jz (isotropic); use gate_g_xxz for the general case.
inline PhaseGate gate_g(Model model, const RelativeKinematics& kin, double coupling) {
    switch (model) {
        case Model::TJ: return PhaseGate::singlet(std::arg(tj_reflection(kin, coupling).R));
        case Model::Hubbard: return PhaseGate::singlet(std::arg(hubbard_phase(kin, coupling)));
        case Model::XXZ: return gate_g_xxz(kin, coupling, coupling).gate;
    }
    throw ConfigError("unsupported model");
}

// ---------------------------------------------------------------------------
// Phase curves

struct PhaseCurveRow {
    double coupling = 0.0;
    bool singular = false;
    double theta = 0.0;            // Arg in (-pi, pi]
    double theta_unwrapped = 0.0;  // continuous branch along the grid
    cplx amplitude{};              // R (t-J), T+R (Hubbard), singlet ratio (XXZ)
    double theta1 = 0.0;           // XXZ only
    double theta1_unwrapped = 0.0;
};

/// Which XXZ coupling a curve sweeps; the other one is held fixed.
enum class XxzSweep { Jx, Jz };

struct PhaseCurveOptions {
    XxzSweep sweep = XxzSweep::Jx;
    double fixed = 0.0;  // the XXZ coupling not being swept
};

/**
 * theta along a coupling grid. The unwrapped branch starts at the first
 * regular point's principal value and continues by adding the principal
 * difference between consecutive regular points. Singular points are flagged
 * and skipped by the unwrapping.
 */
inline std::vector<PhaseCurveRow> phase_curve(Model model, const RelativeKinematics& kin, const std::vector<double>& grid,
                                              const PhaseCurveOptions& opt = {}) {
    if (grid.empty()) throw ConfigError("phase curve grid is empty");
    std::vector<PhaseCurveRow> rows;
    bool have_prev = false;
    double prev = 0.0, prev_u = 0.0, prev1 = 0.0, prev1_u = 0.0;
    for (double x : grid) {
        PhaseCurveRow row;
        row.coupling = x;
        try {
            switch (model) {
                case Model::TJ: row.amplitude = tj_reflection(kin, x).R; break;
                case Model::Hubbard: row.amplitude = hubbard_phase(kin, x); break;
                case Model::XXZ: {
                    const double jx = opt.sweep == XxzSweep::Jx ? x : opt.fixed;
                    const double jz = opt.sweep == XxzSweep::Jz ? x : opt.fixed;
                    auto g = gate_g_xxz(kin, jx, jz);
                    row.amplitude = g.channel_amplitudes[spin::S] / g.channel_amplitudes[spin::TPlus];
                    row.theta1 = g.theta1;
                    break;
                }
            }
        } catch (const SingularSystemError&) {
            row.singular = true;
            rows.push_back(row);
            continue;
        }
        row.theta = std::arg(row.amplitude);
        if (!have_prev) {
            row.theta_unwrapped = row.theta;
            row.theta1_unwrapped = row.theta1;
            have_prev = true;
        } else {
            row.theta_unwrapped = prev_u + wrap_phase(row.theta - prev);
            row.theta1_unwrapped = prev1_u + wrap_phase(row.theta1 - prev1);
        }
        prev = row.theta;
        prev_u = row.theta_unwrapped;
        prev1 = row.theta1;
        prev1_u = row.theta1_unwrapped;
        rows.push_back(row);
    }
    return rows;
}

/// Parses "start:stop:count" into count evenly spaced values (endpoints included).
inline std::vector<double> parse_grid(const std::string& spec) {
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw ConfigError("grid must be start:stop:count, got '" + spec + "'");
    double start = 0, stop = 0;
    long long count = 0;
    try {
        std::size_t used = 0;
        start = std::stod(spec.substr(0, a), &used);
        if (used != a) throw std::invalid_argument("start");
        const std::string s2 = spec.substr(a + 1, b - a - 1);
        stop = std::stod(s2, &used);
        if (used != s2.size()) throw std::invalid_argument("stop");
        const std::string s3 = spec.substr(b + 1);
        count = std::stoll(s3, &used);
        if (used != s3.size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw ConfigError("grid must be start:stop:count, got '" + spec + "'");
    }
    if (count < 1) throw ConfigError("grid count must be positive");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return g;
}

}  // namespace scatterlab
