#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "dlss/error.hpp"

namespace dlss {

/// Row-major dense square matrix. Used for cross-checks and as a fallback solver.
template <std::floating_point Real = double>
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, Real(0)) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    std::size_t n() const noexcept { return n_; }
    Real& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    Real operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    std::vector<Real> multiply(std::span<const std::type_identity_t<Real>> x) const {
        std::vector<Real> y(n_, Real(0));
        for (std::size_t i = 0; i < n_; ++i) {
            Real s = 0;
            for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    Real max_abs() const {
        Real m = 0;
        for (Real v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t n_;
    std::vector<Real> a_;
};

/**
 * N x N matrix whose row i is nonzero only at columns (i-2 .. i+2) mod N.
 *
 * Diagonal k (k = 0..4) holds offset k-2: entry(i, i+k-2 mod N) = diag(k)[i].
 * Wrap-around corner entries live in the same arrays under modulo indexing.
 */
template <std::floating_point Real = double>
class CyclicPentaMatrix {
public:
    static constexpr int bandwidth = 2;

    explicit CyclicPentaMatrix(std::size_t n) : n_(n) {
        if (n < 5) throw DomainError("cyclic pentadiagonal matrix needs n >= 5");
        for (auto& d : diags_) d.assign(n, Real(0));
    }

    static CyclicPentaMatrix identity(std::size_t n) {
        CyclicPentaMatrix m(n);
        std::fill(m.diags_[2].begin(), m.diags_[2].end(), Real(1));
        return m;
    }

    std::size_t n() const noexcept { return n_; }

    /// Entry (i, i+offset mod N), offset in [-2, 2].
    Real& at(std::size_t i, int offset) noexcept { return diags_[offset + bandwidth][i]; }
    Real at(std::size_t i, int offset) const noexcept { return diags_[offset + bandwidth][i]; }

    std::size_t column(std::size_t i, int offset) const noexcept {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        auto j = (static_cast<std::ptrdiff_t>(i) + offset) % n;
        if (j < 0) j += n;
        return static_cast<std::size_t>(j);
    }

    std::vector<Real> multiply(std::span<const std::type_identity_t<Real>> x) const {
        std::vector<Real> y(n_, Real(0));
        for (std::size_t i = 0; i < n_; ++i) {
            Real s = 0;
            for (int k = -bandwidth; k <= bandwidth; ++k) s += at(i, k) * x[column(i, k)];
            y[i] = s;
        }
        return y;
    }

    Real max_abs() const {
        Real m = 0;
        for (const auto& d : diags_)
            for (Real v : d) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_;
    std::array<std::vector<Real>, 5> diags_;
};

template <std::floating_point Real>
DenseMatrix<Real> to_dense(const CyclicPentaMatrix<Real>& m) {
    DenseMatrix<Real> d(m.n());
    for (std::size_t i = 0; i < m.n(); ++i)
        for (int k = -2; k <= 2; ++k) d(i, m.column(i, k)) = m.at(i, k);
    return d;
}

/// Inverse of to_dense. Rejects matrices with entries outside the cyclic band.
template <std::floating_point Real>
CyclicPentaMatrix<Real> from_dense(const DenseMatrix<Real>& d) {
    CyclicPentaMatrix<Real> m(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.n(); ++j) {
            bool in_band = false;
            for (int k = -2; k <= 2; ++k) {
                if (m.column(i, k) == j) {
                    m.at(i, k) = d(i, j);
                    in_band = true;
                }
            }
            if (!in_band && d(i, j) != Real(0)) {
                throw DomainError("from_dense: entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") lies outside the cyclic band");
            }
        }
    }
    return m;
}

/// Gaussian elimination with partial pivoting on a dense copy.
template <std::floating_point Real>
std::vector<Real> dense_lu_solve(DenseMatrix<Real> a, std::vector<Real> b) {
    const std::size_t n = a.n();
    const Real threshold = Real(1e-14) * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (!(std::abs(a(p, k)) > threshold)) throw SingularMatrixError("dense LU: singular matrix", k);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const Real f = a(i, k) / a(k, k);
            if (f == Real(0)) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<Real> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Real s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

namespace detail {

/**
 * LU factors of a non-periodic band matrix with lower bandwidth 2 and upper
 * bandwidth 2, with partial pivoting (fill raises the upper bandwidth to 4).
 */
template <std::floating_point Real>
class BandLU {
public:
    static constexpr int kl = 2;
    static constexpr int ku = 4; // 2 + fill from row interchanges
    static constexpr int width = kl + ku + 1;

    BandLU(std::size_t n, Real threshold) : n_(n), threshold_(threshold), ab_(n * width, Real(0)), piv_(n) {}

    // Entry (i, j) with j - i in [-kl, ku].
    Real& operator()(std::size_t i, std::size_t j) noexcept { return ab_[i * width + (j + kl - i)]; }
    Real operator()(std::size_t i, std::size_t j) const noexcept { return ab_[i * width + (j + kl - i)]; }

    void factor() {
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t last_row = std::min(n_ - 1, k + kl);
            std::size_t p = k;
            for (std::size_t i = k + 1; i <= last_row; ++i)
                if (std::abs((*this)(i, k)) > std::abs((*this)(p, k))) p = i;
            if (!(std::abs((*this)(p, k)) > threshold_)) {
                throw SingularMatrixError("banded LU: singular band core", k);
            }
            piv_[k] = p;
            const std::size_t last_col = std::min(n_ - 1, k + static_cast<std::size_t>(ku));
            if (p != k) {
                for (std::size_t j = k; j <= last_col; ++j) std::swap((*this)(k, j), (*this)(p, j));
            }
            for (std::size_t i = k + 1; i <= last_row; ++i) {
                const Real f = (*this)(i, k) / (*this)(k, k);
                (*this)(i, k) = f;
                if (f == Real(0)) continue;
                for (std::size_t j = k + 1; j <= last_col; ++j) (*this)(i, j) -= f * (*this)(k, j);
            }
        }
    }

    void solve_in_place(std::span<Real> b) const {
        for (std::size_t k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            const std::size_t last_row = std::min(n_ - 1, k + kl);
            for (std::size_t i = k + 1; i <= last_row; ++i) b[i] -= (*this)(i, k) * b[k];
        }
        for (std::size_t i = n_; i-- > 0;) {
            Real s = b[i];
            const std::size_t last_col = std::min(n_ - 1, i + static_cast<std::size_t>(ku));
            for (std::size_t j = i + 1; j <= last_col; ++j) s -= (*this)(i, j) * b[j];
            b[i] = s / (*this)(i, i);
        }
    }

private:
    std::size_t n_;
    Real threshold_;
    std::vector<Real> ab_;
    std::vector<std::size_t> piv_;
};

} // namespace detail

/**
 * Solve m x = rhs for a cyclic pentadiagonal m.
 *
 * m is split into its non-periodic band core B and the wrap-around corner
 * block, which only touches rows and columns {0, 1, N-2, N-1}. Writing the
 * corners as P C with P the four selected unit columns, Woodbury gives
 *   x = y - Z (I + C Z)^{-1} C y,  y = B^{-1} rhs,  Z = B^{-1} P.
 * If the band core alone is singular the dense LU path is used instead.
 */
template <std::floating_point Real>
std::vector<Real> solve_cyclic_penta(const CyclicPentaMatrix<Real>& m, std::span<const std::type_identity_t<Real>> rhs) {
    const std::size_t n = m.n();
    if (rhs.size() != n) throw DomainError("solve_cyclic_penta: rhs size mismatch");
    const Real threshold = Real(1e-14) * m.max_abs();
    if (!(threshold > Real(0))) throw SingularMatrixError("solve_cyclic_penta: zero matrix", 0);

    const std::array<std::size_t, 4> border{0, 1, n - 2, n - 1};
    // corner(r, c): coefficient of row border[r] against column border[c]
    std::array<std::array<Real, 4>, 4> corner{};
    detail::BandLU<Real> band(n, threshold);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = -2; k <= 2; ++k) {
            const std::size_t j = m.column(i, k);
            const auto gap = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
            if (gap >= -2 && gap <= 2) {
                band(i, j) += m.at(i, k);
            } else {
                const auto r = static_cast<std::size_t>(std::find(border.begin(), border.end(), i) - border.begin());
                const auto c = static_cast<std::size_t>(std::find(border.begin(), border.end(), j) - border.begin());
                corner[r][c] += m.at(i, k);
            }
        }
    }

    try {
        band.factor();
    } catch (const SingularMatrixError&) {
        return dense_lu_solve(to_dense(m), std::vector<Real>(rhs.begin(), rhs.end()));
    }

    std::vector<Real> y(rhs.begin(), rhs.end());
    band.solve_in_place(y);

    std::array<std::vector<Real>, 4> z;
    for (std::size_t c = 0; c < 4; ++c) {
        z[c].assign(n, Real(0));
        z[c][border[c]] = Real(1);
        band.solve_in_place(z[c]);
    }

    // capacitance = I + C Z (4x4), t = C y
    DenseMatrix<Real> cap = DenseMatrix<Real>::identity(4);
    std::vector<Real> t(4, Real(0));
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            if (corner[r][c] == Real(0)) continue;
            t[r] += corner[r][c] * y[border[c]];
            for (std::size_t q = 0; q < 4; ++q) cap(r, q) += corner[r][c] * z[q][border[c]];
        }
    }
    std::vector<Real> s;
    try {
        s = dense_lu_solve(cap, t);
    } catch (const SingularMatrixError&) {
        return dense_lu_solve(to_dense(m), std::vector<Real>(rhs.begin(), rhs.end()));
    }
    for (std::size_t q = 0; q < 4; ++q)
        for (std::size_t i = 0; i < n; ++i) y[i] -= z[q][i] * s[q];
    return y;
}

} // namespace dlss
