#pragma once

#include "scatterlab/sparse.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace scatterlab {

/// Bessel functions J_0..J_nmax at z >= 0 by Miller's backward recurrence,
/// normalized with J_0 + 2 * sum J_2k = 1.
inline std::vector<double> bessel_j_sequence(std::size_t nmax, double z) {
    std::vector<double> out(nmax + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const auto start = static_cast<std::size_t>(std::max<double>(static_cast<double>(nmax), z)) + 40 +
                       static_cast<std::size_t>(std::sqrt(40.0 * (static_cast<double>(nmax) + z)));
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    for (std::size_t n = start; n >= 1; --n) {
        j[n - 1] = (2.0 * static_cast<double>(n) / z) * j[n] - j[n + 1];
        if (std::abs(j[n - 1]) > 1e250) {
            for (std::size_t m = n - 1; m <= start + 1; ++m) j[m] *= 1e-250;
        }
    }
    double norm = j[0];
    for (std::size_t n = 2; n <= start; n += 2) norm += 2.0 * j[n];
    for (std::size_t n = 0; n <= nmax; ++n) out[n] = j[n] / norm;
    return out;
}

struct PropagationReport {
    std::size_t terms = 0;          // Chebyshev terms (matrix-vector products)
    double truncation_bound = 0.0;  // certified 2-norm bound on the series tail
};

/**
 * Applies exp(-i H t) to a vector with a Chebyshev expansion. The spectrum is
 * enclosed with Gershgorin discs, so the expansion converges for any Hermitian
 * H; truncation uses the bound J_{n+1}(z)/J_n(z) < z/(n+1) valid for n >= z.
 */
class ChebyshevPropagator {
public:
    explicit ChebyshevPropagator(const CsrMatrix& h) : h_(h) {
        auto [lo, hi] = h_.gershgorin();
        center_ = 0.5 * (hi + lo);
        half_width_ = std::max(0.5 * (hi - lo) * 1.01, 1e-12);
    }

    double half_width() const { return half_width_; }

    CVector apply(std::span<const cplx> psi, double time, double tol = 1e-10, PropagationReport* report = nullptr) const {
        CVector out(psi.begin(), psi.end());
        if (time == 0.0) {
            if (report) *report = {};
            return out;
        }
        const double z = half_width_ * std::abs(time);
        const double sgn = time > 0 ? 1.0 : -1.0;

        // Pick the truncation order from the certified tail bound.
        std::size_t nmax = static_cast<std::size_t>(std::ceil(z)) + 8;
        std::vector<double> jn;
        double bound = 0.0;
        for (;;) {
            jn = bessel_j_sequence(nmax + 1, z);
            const double ratio = z / static_cast<double>(nmax + 2);
            bound = 2.0 * std::abs(jn[nmax + 1]) / (1.0 - ratio);
            if (ratio < 1.0 && bound <= tol) break;
            nmax += std::max<std::size_t>(8, nmax / 8);
        }

        const std::size_t dim = psi.size();
        CVector t_prev(psi.begin(), psi.end());  // T_0 psi
        CVector t_cur(dim);                      // T_1 psi
        h_.multiply(psi, t_cur);
        for (std::size_t i = 0; i < dim; ++i) t_cur[i] = (t_cur[i] - center_ * psi[i]) / half_width_;

        // (-i sgn)^n
        const cplx step(0.0, -sgn);
        cplx phase_n = step;
        for (std::size_t i = 0; i < dim; ++i) out[i] = jn[0] * psi[i] + 2.0 * jn[1] * phase_n * t_cur[i];
        for (std::size_t n = 2; n <= nmax; ++n) {
            h_.chebyshev_step(t_cur, t_prev, center_, half_width_);
            std::swap(t_prev, t_cur);
            phase_n *= step;
            const cplx c = 2.0 * jn[n] * phase_n;
            for (std::size_t i = 0; i < dim; ++i) out[i] += c * t_cur[i];
        }
        const cplx global = std::exp(cplx(0.0, -center_ * time));
        for (auto& v : out) v *= global;
        if (report) *report = {nmax + 1, bound};
        return out;
    }

private:
    const CsrMatrix& h_;
    double center_ = 0.0;
    double half_width_ = 1.0;
};

}  // namespace scatterlab
