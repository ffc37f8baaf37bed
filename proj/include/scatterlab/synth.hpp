#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/phases.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace scatterlab {

using BigInt = boost::multiprecision::cpp_int;

struct Convergent {
    BigInt p, q;
};

/**
 * Continued fraction of a double, computed exactly: the double is a dyadic
 * rational, so every convergent is exact and the 1/q^2 bound can be checked
 * in integers against the value actually stored.
 */
struct ContinuedFraction {
    double target = 0.0;              // alpha reduced mod 1
    BigInt numerator, denominator;    // exact value of target
    std::vector<BigInt> partial_quotients;
    std::vector<Convergent> convergents;
    bool rational_detected = false;   // terminated, or hit within 1e-15 at a small q
    bool precision_exhausted = false; // stopped at 1e-15 with a large q

    /// Exact |alpha - p/q| as a double.
    double error(std::size_t r) const {
        const auto& c = convergents.at(r);
        const BigInt num = abs(numerator * c.q - c.p * denominator);
        return static_cast<double>(num) / static_cast<double>(denominator) / static_cast<double>(c.q);
    }

    /// |alpha - p/q| < 1/q^2, i.e. |N q - p D| q < D, in integers.
    bool within_inverse_square(std::size_t r) const {
        const auto& c = convergents.at(r);
        return abs(numerator * c.q - c.p * denominator) * c.q < denominator;
    }
};

inline constexpr std::size_t kMaxConvergents = 64;
inline constexpr double kRationalTolerance = 1e-15;
inline constexpr double kRationalMaxDenominator = 1e6;

inline std::pair<BigInt, BigInt> exact_dyadic(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("exact_dyadic needs a finite non-negative value");
    if (x == 0.0) return {BigInt(0), BigInt(1)};
    int e = 0;
    const double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
    BigInt num(static_cast<long long>(std::ldexp(m, 53)));
    BigInt den(1);
    int shift = 53 - e;
    if (shift >= 0)
        den <<= shift;
    else
        num <<= -shift;
    const BigInt g = gcd(num, den);
    return {num / g, den / g};
}

inline ContinuedFraction continued_fraction(double alpha, std::size_t max_convergents) {
    if (!std::isfinite(alpha)) throw ConfigError("continued_fraction needs a finite alpha");
    if (max_convergents == 0 || max_convergents > kMaxConvergents)
        throw ConfigError("max_convergents must be in 1..64");
    ContinuedFraction cf;
    cf.target = alpha - std::floor(alpha);
    if (cf.target >= 1.0) cf.target = 0.0;  // -tiny rounds up to 1
    std::tie(cf.numerator, cf.denominator) = exact_dyadic(cf.target);

    BigInt n = cf.numerator, d = cf.denominator;
    BigInt p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    while (cf.convergents.size() < max_convergents) {
        const BigInt a = n / d;
        const BigInt rem = n - a * d;
        const BigInt p = a * p1 + p2, q = a * q1 + q2;
        cf.partial_quotients.push_back(a);
        cf.convergents.push_back({p, q});
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
        if (rem == 0) {
            cf.rational_detected = true;
            break;
        }
        if (cf.error(cf.convergents.size() - 1) <= kRationalTolerance) {
            if (static_cast<double>(q) <= kRationalMaxDenominator)
                cf.rational_detected = true;
            else
                cf.precision_exhausted = true;
            break;
        }
        n = d;
        d = rem;
    }
    return cf;
}

/// q_r >= 2^{(r-1)/2} with r counted from 0, checked as q_r^2 >= 2^{r-1}.
inline bool denominator_growth_ok(const ContinuedFraction& cf, std::size_t r) {
    const BigInt& q = cf.convergents.at(r).q;
    if (r == 0) return q >= 1;  // 2^{-1/2} < 1
    return q * q >= (BigInt(1) << (r - 1));
}

// ---------------------------------------------------------------------------
// Powers of G against the Heisenberg exchange

/// Arc distance between two phases, in [0, pi].
inline double circle_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

/// Which sign of gamma*t the singlet phase of G^k has to reproduce.
/// Heisenberg: exp(i gt S1.S2) = exp(i gt/4) diag(1, 1, exp(-i gt), 1), so
/// the singlet target is -gt. Direct targets +gt.
enum class Orientation { Heisenberg, Direct };

inline double singlet_target(double gamma_t, Orientation o) {
    return wrap_phase(o == Orientation::Heisenberg ? -gamma_t : gamma_t);
}

/// exp(i gt S1.S2) as a diagonal gate in the coupled basis.
inline PhaseGate heisenberg_gate(double gamma_t) {
    PhaseGate u;
    const cplx tr = std::polar(1.0, gamma_t / 4.0);
    u.diag = {tr, tr, std::polar(1.0, -0.75 * gamma_t), tr};
    return u;
}

/// sup-norm distance between G^k and exp(i gt S1.S2) with its global phase
/// exp(i gt/4) removed.
inline double heisenberg_distance(const PhaseGate& gk, double gamma_t) {
    const auto u = heisenberg_gate(gamma_t);
    const cplx strip = std::polar(1.0, -gamma_t / 4.0);
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(gk.diag[i] - strip * u.diag[i]));
    return d;
}

/// Phase 2 k theta reduced to (-pi, pi], accumulated in long double.
inline double power_phase(double theta, long long k) {
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    long double x = std::fmod(2.0L * static_cast<long double>(theta) * static_cast<long double>(k), two_pi);
    if (x > std::numbers::pi_v<long double>) x -= two_pi;
    if (x <= -std::numbers::pi_v<long double>) x += two_pi;
    return static_cast<double>(x);
}

struct SynthesisPlan {
    long long k = 0;
    double achieved_error = 0.0;  // arc distance between 2 k theta and target_phase
    double target_phase = 0.0;    // singlet phase aimed at
    double gamma_t = 0.0;
    double theta = 0.0;           // per-collision phase; G^k contributes 2 k theta
    Orientation orientation = Orientation::Heisenberg;
    std::size_t convergents_used = 0;
    long long guided_bound = 0;   // first convergent q with 3 pi / q <= eps
    bool within_guided_bound = false;
};

inline constexpr long long kDefaultBudget = 10'000'000;

inline void check_epsilon(double eps) {
    if (!(eps > 1e-12 && eps < std::numbers::pi)) throw ConfigError("epsilon must lie in (1e-12, pi)");
}

/**
 * Smallest k >= 1 with arc distance(2 k theta, target) <= eps. Rational
 * theta/pi = p/q makes G^k periodic, so only k <= q is tried before reporting
 * UNREACHABLE. Otherwise the convergents give the expected bound and a
 * straight scan up to the budget guarantees the minimal k.
 */
inline SynthesisPlan plan_power(double theta, double gamma_t, double eps,
                                Orientation orientation = Orientation::Heisenberg,
                                long long budget = kDefaultBudget) {
    check_epsilon(eps);
    if (!std::isfinite(theta) || !std::isfinite(gamma_t)) throw ConfigError("theta and gamma_t must be finite");
    if (budget < 1) throw ConfigError("budget must be positive");
    SynthesisPlan plan;
    plan.theta = theta;
    plan.gamma_t = gamma_t;
    plan.orientation = orientation;
    plan.target_phase = singlet_target(gamma_t, orientation);

    const auto cf = continued_fraction(std::abs(theta) / std::numbers::pi, kMaxConvergents);
    long long scan_to = budget;
    if (cf.rational_detected) {
        const auto period = static_cast<long long>(cf.convergents.back().q);
        plan.convergents_used = cf.convergents.size();
        plan.guided_bound = period;
        scan_to = std::min(period, budget);
        for (long long k = 1; k <= scan_to; ++k) {
            const double e = circle_distance(power_phase(theta, k), plan.target_phase);
            if (e <= eps) {
                plan.k = k;
                plan.achieved_error = e;
                plan.within_guided_bound = true;
                return plan;
            }
        }
        if (period <= budget) throw UnreachableError(period);
        throw BudgetExceededError(budget);
    }

    for (std::size_t r = 0; r < cf.convergents.size(); ++r) {
        const double q = static_cast<double>(cf.convergents[r].q);
        plan.convergents_used = r + 1;
        if (3.0 * std::numbers::pi / q <= eps) {
            plan.guided_bound = q < 9e18 ? static_cast<long long>(q) : budget;
            break;
        }
    }
    for (long long k = 1; k <= scan_to; ++k) {
        const double e = circle_distance(power_phase(theta, k), plan.target_phase);
        if (e <= eps) {
            plan.k = k;
            plan.achieved_error = e;
            plan.within_guided_bound = plan.guided_bound > 0 && k <= plan.guided_bound;
            return plan;
        }
    }
    throw BudgetExceededError(budget);
}

// ---------------------------------------------------------------------------
// Suitability of a collision phase for synthesis

struct SuitabilityReport {
    std::size_t convergents_requested = 0;  // ceil(2 log2(1/eps) + 1)
    std::size_t convergents_computed = 0;
    std::vector<long long> denominators;    // saturated at LLONG_MAX
    bool suitable = false;                  // some q in [1/(c eps), c/eps]
    long long best_q = 0;
    double resolution = 0.0;                // 3 pi / best_q
    double max_growth_ratio = 0.0;          // largest q_{r+1} / q_r
    long long gap_after = 0;                // q_r preceding that jump
    bool rational = false;
};

inline std::size_t suitability_convergent_count(double eps) {
    check_epsilon(eps);
    return static_cast<std::size_t>(std::ceil(2.0 * std::log2(1.0 / eps) + 1.0));
}

inline SuitabilityReport suitability(double theta, double eps, double c = 10.0) {
    if (!(c >= 1.0)) throw ConfigError("suitability window constant must be >= 1");
    SuitabilityReport rep;
    rep.convergents_requested = suitability_convergent_count(eps);
    const auto cf = continued_fraction(std::abs(theta) / std::numbers::pi,
                                       std::min(rep.convergents_requested, kMaxConvergents));
    rep.convergents_computed = cf.convergents.size();
    rep.rational = cf.rational_detected;
    const double lo = 1.0 / (c * eps), hi = c / eps;
    double prev = 0.0;
    for (const auto& cv : cf.convergents) {
        const double q = static_cast<double>(cv.q);
        rep.denominators.push_back(q < 9.2e18 ? static_cast<long long>(cv.q) : std::numeric_limits<long long>::max());
        if (q >= lo && q <= hi) {
            rep.suitable = true;
            rep.best_q = rep.denominators.back();
        }
        if (prev > 0.0 && q / prev > rep.max_growth_ratio) {
            rep.max_growth_ratio = q / prev;
            rep.gap_after = static_cast<long long>(prev);
        }
        prev = q;
    }
    if (rep.best_q > 0) rep.resolution = 3.0 * std::numbers::pi / static_cast<double>(rep.best_q);
    return rep;
}

// ---------------------------------------------------------------------------
// Orbit geometry of the phases 2 k theta

/// Sorted arc gaps left on the circle by the phases 2 theta, ..., 2 k theta.
inline std::vector<double> circle_gaps(double theta, long long k) {
    if (k < 1) throw ConfigError("need at least one point");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(k));
    for (long long j = 1; j <= k; ++j) pts.push_back(power_phase(theta, j) + std::numbers::pi);
    std::sort(pts.begin(), pts.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < pts.size(); ++i) gaps.push_back(pts[i] - pts[i - 1]);
    gaps.push_back(two_pi - pts.back() + pts.front());
    std::sort(gaps.begin(), gaps.end());
    return gaps;
}

/// Number of distinct gap lengths, grouping lengths within rel_tol.
inline std::size_t distinct_gap_lengths(const std::vector<double>& sorted_gaps, double rel_tol = 1e-9) {
    std::size_t n = 0;
    double last = -1.0;
    for (double g : sorted_gaps) {
        if (last < 0.0 || g - last > rel_tol * std::max(1.0, g)) {
            ++n;
            last = g;
        }
    }
    return n;
}

/**
 * Smallest N for which the phases 2 theta, ..., 2 N theta leave no arc gap
 * longer than 2 eps: from then on every target is within eps of some k <= N,
 * so N is the worst-case k over all gamma_t.
 */
inline long long covering_count(double theta, double eps, long long budget = kDefaultBudget) {
    check_epsilon(eps);
    const double two_pi = 2.0 * std::numbers::pi;
    // Gap from point l counter-clockwise to point r; l == r is the full circle.
    auto gap = [two_pi](double l, double r) { return r > l ? r - l : r + two_pi - l; };
    std::set<double> pts;
    std::multiset<double> gaps;
    for (long long k = 1; k <= budget; ++k) {
        const double x = power_phase(theta, k) + std::numbers::pi;
        auto [it, fresh] = pts.insert(x);
        if (!fresh) continue;
        if (pts.size() == 1) {
            gaps.insert(two_pi);
        } else {
            const double l = it == pts.begin() ? *pts.rbegin() : *std::prev(it);
            const double r = std::next(it) == pts.end() ? *pts.begin() : *std::next(it);
            gaps.erase(gaps.find(gap(l, r)));
            gaps.insert(gap(l, x));
            gaps.insert(gap(x, r));
        }
        if (*gaps.rbegin() <= 2.0 * eps) return k;
    }
    throw BudgetExceededError(budget);
}

}  // namespace scatterlab
