#pragma once

#include "scatterlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scatterlab {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Sets the worker count used by the row-parallel kernels. Results do not
/// depend on it: every output element is produced by exactly one row loop.
inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

/**
 * Real symmetric sparse matrix in CSR form. All Hamiltonians in this library
 * have real matrix elements, so values are stored as doubles and applied to
 * complex vectors.
 */
class CsrMatrix {
public:
    CsrMatrix() = default;

    /// Builds from (row, col, value) triplets; duplicates are summed, exact zeros dropped.
    static CsrMatrix from_triplets(std::size_t dim, std::vector<std::tuple<std::size_t, std::size_t, double>> t) {
        std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
            return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
        });
        CsrMatrix m;
        m.dim_ = dim;
        m.row_ptr_.assign(dim + 1, 0);
        std::size_t i = 0;
        while (i < t.size()) {
            auto [r, c, v] = t[i];
            if (r >= dim || c >= dim) throw NumericalError("sparse triplet out of range");
            std::size_t j = i + 1;
            while (j < t.size() && std::get<0>(t[j]) == r && std::get<1>(t[j]) == c) v += std::get<2>(t[j++]);
            if (v != 0.0) {
                m.cols_.push_back(static_cast<std::uint32_t>(c));
                m.vals_.push_back(v);
                ++m.row_ptr_[r + 1];
            }
            i = j;
        }
        for (std::size_t r = 0; r < dim; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return vals_.size(); }

    double at(std::size_t r, std::size_t c) const {
        auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
        auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
        auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(c));
        return (it != e && *it == c) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
    }

    template <typename F>
    void for_each_in_row(std::size_t r, F&& f) const {
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) f(static_cast<std::size_t>(cols_[p]), vals_[p]);
    }

    /// y = A x
    void multiply(std::span<const cplx> x, std::span<cplx> y) const {
        const auto n = static_cast<std::ptrdiff_t>(dim_);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < n; ++r) {
            cplx acc = 0.0;
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += vals_[p] * x[cols_[p]];
            y[r] = acc;
        }
    }

    /// Chebyshev three-term step: next = 2 * (A x - shift x) / scale - prev, in place on prev.
    void chebyshev_step(std::span<const cplx> x, std::span<cplx> prev, double shift, double scale) const {
        const auto n = static_cast<std::ptrdiff_t>(dim_);
        const double f = 2.0 / scale;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < n; ++r) {
            cplx acc = -shift * x[r];
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += vals_[p] * x[cols_[p]];
            prev[r] = f * acc - prev[r];
        }
    }

    /// Gershgorin enclosure [lo, hi] of the spectrum.
    std::pair<double, double> gershgorin() const {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (std::size_t r = 0; r < dim_; ++r) {
            double d = 0.0, off = 0.0;
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
                if (cols_[p] == r) d += vals_[p];
                else off += std::abs(vals_[p]);
            }
            if (first) {
                lo = d - off;
                hi = d + off;
                first = false;
            } else {
                lo = std::min(lo, d - off);
                hi = std::max(hi, d + off);
            }
        }
        return {lo, hi};
    }

    /// max |A - A^T| over stored entries; zero for every matrix built here.
    double asymmetry() const {
        double worst = 0.0;
        for (std::size_t r = 0; r < dim_; ++r)
            for_each_in_row(r, [&](std::size_t c, double v) { worst = std::max(worst, std::abs(v - at(c, r))); });
        return worst;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
};

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline void normalize(CVector& v) {
    const double n = norm2(v);
    if (n == 0.0) throw NumericalError("cannot normalize a zero vector");
    for (auto& z : v) z /= n;
}

}  // namespace scatterlab
