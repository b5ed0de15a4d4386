#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dlss/error.hpp"

namespace dlss {

/**
 * Periodic equidistant grid on the unit torus [0,1).
 *
 * Node i sits at x_i = i*h, h = 1/n, and x_n is identified with x_0.
 * The spacing and its powers are computed once and stored so that every
 * stencil in the library divides by the same bits.
 */
template <std::floating_point Real = double>
class Grid {
public:
    /// Smallest admissible node count: the widest stencil touches i-2..i+2
    /// and those five nodes must be distinct after periodic wrap.
    static constexpr std::size_t min_nodes = 5;

    explicit Grid(std::size_t n)
        : n_(n), h_(Real(1) / static_cast<Real>(n)) {
        if (n < min_nodes) {
            throw DomainError("grid needs at least " + std::to_string(min_nodes) +
                              " nodes, got " + std::to_string(n));
        }
        h2_ = h_ * h_;
        h3_ = h2_ * h_;
        h4_ = h2_ * h2_;
    }

    std::size_t n() const noexcept { return n_; }
    Real h() const noexcept { return h_; }
    Real h2() const noexcept { return h2_; }
    Real h3() const noexcept { return h3_; }
    Real h4() const noexcept { return h4_; }

    Real node(std::size_t i) const noexcept { return static_cast<Real>(i) * h_; }

    std::vector<Real> nodes() const {
        std::vector<Real> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
        return x;
    }

    /// Index i+offset reduced modulo n.
    std::size_t wrap(std::size_t i, std::ptrdiff_t offset) const noexcept {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        auto j = (static_cast<std::ptrdiff_t>(i) + offset) % n;
        if (j < 0) j += n;
        return static_cast<std::size_t>(j);
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_; }

private:
    std::size_t n_;
    Real h_;
    Real h2_{}, h3_{}, h4_{};
};

/// Convenience factory mirroring the constructor.
template <std::floating_point Real = double>
Grid<Real> make_grid(std::size_t n) {
    return Grid<Real>(n);
}

// Field kinds. A density is nonnegative; square-root and generic nodal
// fields carry no sign constraint.
struct NodalKind {};
struct DensityKind {};
struct SqrtKind {};

/**
 * Nodal values on a Grid with periodic indexing.
 *
 * The Kind tag keeps densities U, square roots V and midpoint values W,
 * and plain stencil outputs apart at the type level. A DensityKind field
 * validates nonnegativity on construction and exposes read-only values.
 */
template <std::floating_point Real, class Kind>
class Field {
public:
    using value_type = Real;
    using kind = Kind;

    Field(Grid<Real> grid, std::vector<Real> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.n()) {
            throw DomainError("field has " + std::to_string(values_.size()) +
                              " values for a grid of " + std::to_string(grid_.n()) + " nodes");
        }
        if constexpr (std::is_same_v<Kind, DensityKind>) {
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (!(values_[i] >= Real(0))) {
                    throw DomainError("density must be nonnegative; entry " + std::to_string(i) +
                                      " is " + std::to_string(values_[i]));
                }
            }
        }
    }

    static Field constant(const Grid<Real>& grid, Real c) {
        return Field(grid, std::vector<Real>(grid.n(), c));
    }

    const Grid<Real>& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const Real> values() const noexcept { return values_; }
    std::span<Real> values() noexcept
        requires(!std::is_same_v<Kind, DensityKind>)
    {
        return values_;
    }

    Real operator[](std::size_t i) const noexcept { return values_[i]; }
    Real& operator[](std::size_t i) noexcept
        requires(!std::is_same_v<Kind, DensityKind>)
    {
        return values_[i];
    }

    /// Periodic access at i+offset.
    Real at(std::size_t i, std::ptrdiff_t offset) const noexcept {
        return values_[grid_.wrap(i, offset)];
    }

    const std::vector<Real>& vector() const noexcept { return values_; }

    Real min() const { return *std::min_element(values_.begin(), values_.end()); }
    Real max() const { return *std::max_element(values_.begin(), values_.end()); }

private:
    Grid<Real> grid_;
    std::vector<Real> values_;
};

template <std::floating_point Real = double>
using NodalField = Field<Real, NodalKind>;
template <std::floating_point Real = double>
using DensityField = Field<Real, DensityKind>;
template <std::floating_point Real = double>
using SqrtField = Field<Real, SqrtKind>;

/// Re-tag a field. Converting into a density re-runs its validation.
template <class ToKind, std::floating_point Real, class FromKind>
Field<Real, ToKind> field_cast(const Field<Real, FromKind>& f) {
    return Field<Real, ToKind>(f.grid(), f.vector());
}

template <class F>
concept AnyField = requires(const F& f) {
    typename F::value_type;
    typename F::kind;
    { f.grid() };
    { f.values() };
};

template <AnyField A, AnyField B>
void require_same_grid(const A& a, const B& b, const char* where) {
    if (!(a.grid() == b.grid())) {
        throw DomainError(std::string(where) + ": fields live on different grids (" +
                          std::to_string(a.grid().n()) + " vs " + std::to_string(b.grid().n()) +
                          " nodes)");
    }
}

// -- finite-difference operators --------------------------------------------

template <AnyField F>
NodalField<typename F::value_type> fwd_diff(const F& f) {
    using Real = typename F::value_type;
    const auto& g = f.grid();
    std::vector<Real> out(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = (f.at(i, 1) - f[i]) / g.h();
    return {g, std::move(out)};
}

template <AnyField F>
NodalField<typename F::value_type> bwd_diff(const F& f) {
    using Real = typename F::value_type;
    const auto& g = f.grid();
    std::vector<Real> out(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = (f[i] - f.at(i, -1)) / g.h();
    return {g, std::move(out)};
}

template <AnyField F>
NodalField<typename F::value_type> central_diff(const F& f) {
    using Real = typename F::value_type;
    const auto& g = f.grid();
    const Real two_h = Real(2) * g.h();
    std::vector<Real> out(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = (f.at(i, 1) - f.at(i, -1)) / two_h;
    return {g, std::move(out)};
}

template <AnyField F>
NodalField<typename F::value_type> second_diff(const F& f) {
    using Real = typename F::value_type;
    const auto& g = f.grid();
    std::vector<Real> out(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        out[i] = (f.at(i, 1) - Real(2) * f[i] + f.at(i, -1)) / g.h2();
    }
    return {g, std::move(out)};
}

/// h * sum_i f_i. Coincides with the trapezoidal rule for periodic data.
template <AnyField F>
typename F::value_type quadrature(const F& f) {
    using Real = typename F::value_type;
    Real s = 0;
    for (Real v : f.values()) s += v;
    return f.grid().h() * s;
}

} // namespace dlss
