#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "dlss/functionals.hpp"
#include "dlss/grid.hpp"
#include "dlss/penta.hpp"

namespace dlss {

/// Midpoint values at or below this are rejected by the residual and Jacobian.
template <std::floating_point Real = double>
inline constexpr Real positivity_floor_w = Real(1e-12);

/**
 * Parameters of one implicit step: time step tau in (0,1), dispersion
 * delta >= 0, and the grid the step lives on.
 */
template <std::floating_point Real = double>
class SchemeParams {
public:
    SchemeParams(Grid<Real> grid, Real tau, Real delta) : grid_(std::move(grid)), tau_(tau), delta_(delta) {
        if (!(tau > Real(0)) || !(tau < Real(1))) {
            throw DomainError("time step must satisfy 0 < tau < 1, got " + std::to_string(tau));
        }
        if (!(delta >= Real(0))) {
            throw DomainError("dispersion parameter must be nonnegative, got " + std::to_string(delta));
        }
    }

    const Grid<Real>& grid() const noexcept { return grid_; }
    Real tau() const noexcept { return tau_; }
    Real delta() const noexcept { return delta_; }

    /// tau / (4 h^4), the fourth-order coefficient of the expanded residual.
    Real quartic_coeff() const noexcept { return tau_ / (Real(4) * grid_.h4()); }
    /// tau delta / (8 h^3), the dispersive coefficient of the expanded residual.
    Real dispersive_coeff() const noexcept { return tau_ * delta_ / (Real(8) * grid_.h3()); }

private:
    Grid<Real> grid_;
    Real tau_;
    Real delta_;
};

namespace detail {

template <class Real>
using accumulator_t = std::conditional_t<(sizeof(long double) > sizeof(Real)), long double, Real>;

template <std::floating_point Real>
void require_above_floor(const SqrtField<Real>& w, const char* where) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > positivity_floor_w<Real>)) {
            throw DomainError(std::string(where) + ": W[" + std::to_string(i) + "] = " +
                              std::to_string(w[i]) + " is not above the positivity floor");
        }
    }
}

// (1/W_i) d+_i (W_i W_{i-1} d-_i dF(W)).
template <std::floating_point Real>
NodalField<Real> flux_divergence(const SqrtField<Real>& w) {
    const auto& g = w.grid();
    const auto dfd = var_deriv_single(w);
    const auto grad = bwd_diff(dfd);
    NodalField<Real> flux(g, std::vector<Real>(g.n()));
    for (std::size_t i = 0; i < g.n(); ++i) flux[i] = w[i] * w.at(i, -1) * grad[i];
    auto out = fwd_diff(flux);
    for (std::size_t i = 0; i < g.n(); ++i) out[i] /= w[i];
    return out;
}

} // namespace detail

/**
 * Monotone discrete operator A_d on positive vectors:
 *   A_d(W)_i = -(1/W_i) d+_i (W_i W_{i-1} d-_i dF(W)_i).
 *
 * With this sign <A_d(w) - A_d(W), w - W>_h = h sum w_i W_i (dF(w) - dF(W))_i^2
 * and the fourth-order part of the step reads (V_next - V_prev)/tau = -A_d(W)/2.
 */
template <std::floating_point Real>
NodalField<Real> op_Ad(const SqrtField<Real>& w) {
    detail::require_positive<Real>(w.values(), "op_Ad");
    auto out = detail::flux_divergence(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i];
    return out;
}

/**
 * Right-hand side of (V_next - V_prev)/tau at the midpoint W:
 *   (1/(2W_i)) d+_i(W_i W_{i-1} d-_i dF(W)) - (delta/2) d<1>_i(W dF(W)).
 */
template <std::floating_point Real>
NodalField<Real> scheme_rhs(const SqrtField<Real>& w, Real delta) {
    detail::require_positive<Real>(w.values(), "scheme_rhs");
    const auto& g = w.grid();
    auto out = detail::flux_divergence(w);
    const auto dfd = var_deriv_single(w);
    NodalField<Real> wdf(g, std::vector<Real>(g.n()));
    for (std::size_t i = 0; i < g.n(); ++i) wdf[i] = w[i] * dfd[i];
    const auto disp = central_diff(wdf);
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = Real(0.5) * out[i] - Real(0.5) * delta * disp[i];
    return out;
}

/// R = (W - V_prev) - (tau/2) * scheme_rhs(W). Test oracle for residual_expanded.
template <std::floating_point Real>
NodalField<Real> residual_structural(const SqrtField<Real>& w, const SqrtField<Real>& v_prev,
                                     const SchemeParams<Real>& p) {
    require_same_grid(w, v_prev, "residual_structural");
    if (!(w.grid() == p.grid())) throw DomainError("residual_structural: field and scheme grids differ");
    auto out = scheme_rhs(w, p.delta());
    const Real half_tau = Real(0.5) * p.tau();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (w[i] - v_prev[i]) - half_tau * out[i];
    return out;
}

/**
 * Expanded five-point residual in the midpoint unknown W:
 *   R_i = (W_i - V_i) + a (W_{i+2} + 2W_i + W_{i-2} - (W_{i+1} + W_{i-1})^2 / W_i)
 *                     - b (W_{i+2} - 2W_{i+1} + 2W_{i-1} - W_{i-2})
 * with a = tau/(4h^4), b = tau delta/(8h^3).
 */
template <std::floating_point Real>
NodalField<Real> residual_expanded(const SqrtField<Real>& w, const SqrtField<Real>& v_prev,
                                   const SchemeParams<Real>& p) {
    require_same_grid(w, v_prev, "residual_expanded");
    if (!(w.grid() == p.grid())) throw DomainError("residual_expanded: field and scheme grids differ");
    detail::require_above_floor(w, "residual_expanded");
    // The brackets cancel to O(h^4) against coefficients of size tau/h^4, so
    // they are accumulated in extended precision.
    using Acc = detail::accumulator_t<Real>;
    const Acc a = p.quartic_coeff();
    const Acc b = p.dispersive_coeff();
    const std::size_t n = w.size();
    std::vector<Real> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Acc wm2 = w.at(i, -2), wm1 = w.at(i, -1), wi = w[i], wp1 = w.at(i, 1), wp2 = w.at(i, 2);
        const Acc s = wp1 + wm1;
        const Acc quartic = wp2 + Acc(2) * wi + wm2 - s * s / wi;
        const Acc dispersive = wp2 - Acc(2) * wp1 + Acc(2) * wm1 - wm2;
        r[i] = static_cast<Real>((wi - Acc(v_prev[i])) + a * quartic - b * dispersive);
    }
    return {w.grid(), std::move(r)};
}

/// Analytic Jacobian dR_i/dW_j of residual_expanded.
template <std::floating_point Real>
CyclicPentaMatrix<Real> jacobian_expanded(const SqrtField<Real>& w, const SchemeParams<Real>& p) {
    if (!(w.grid() == p.grid())) throw DomainError("jacobian_expanded: field and scheme grids differ");
    detail::require_above_floor(w, "jacobian_expanded");
    const Real a = p.quartic_coeff();
    const Real b = p.dispersive_coeff();
    const std::size_t n = w.size();
    CyclicPentaMatrix<Real> jac(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Real wi = w[i];
        const Real s = w.at(i, 1) + w.at(i, -1);
        const Real ratio = s / wi;
        jac.at(i, -2) = a + b;
        jac.at(i, -1) = -Real(2) * a * ratio - Real(2) * b;
        jac.at(i, 0) = Real(1) + a * (Real(2) + ratio * ratio);
        jac.at(i, 1) = -Real(2) * a * ratio + Real(2) * b;
        jac.at(i, 2) = a - b;
    }
    return jac;
}

} // namespace dlss
