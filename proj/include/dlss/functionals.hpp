#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dlss/grid.hpp"

namespace dlss {

/// Structure quantities of a density snapshot.
template <std::floating_point Real = double>
struct StructureMetrics {
    Real mass{};
    Real fisher{};              // F_d
    Real entropy{};             // E_d
    Real hellinger_to_steady{}; // H_d(U, 1)
    Real min_value{};
};

namespace detail {

template <AnyField F>
std::vector<typename F::value_type> sqrt_values(const F& u) {
    std::vector<typename F::value_type> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = std::sqrt(u[i]);
    return v;
}

template <std::floating_point Real>
void require_positive(std::span<const std::type_identity_t<Real>> w, const char* where) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > Real(0))) {
            throw DomainError(std::string(where) + ": entry " + std::to_string(i) +
                              " must be positive, got " + std::to_string(w[i]));
        }
    }
}

} // namespace detail

/// F_d[U] = 1/2 sum_i ((d+ V)_i^2 + (d- V)_i^2) h with V = sqrt(U).
template <std::floating_point Real>
Real discrete_fisher(const DensityField<Real>& u) {
    const auto& g = u.grid();
    const SqrtField<Real> v(g, detail::sqrt_values(u));
    const auto fwd = fwd_diff(v);
    const auto bwd = bwd_diff(v);
    Real s = 0;
    for (std::size_t i = 0; i < g.n(); ++i) s += fwd[i] * fwd[i] + bwd[i] * bwd[i];
    return Real(0.5) * s * g.h();
}

/// delta F_d(W)_i = -(d<2> W)_i / W_i.
template <std::floating_point Real>
NodalField<Real> var_deriv_single(const SqrtField<Real>& w) {
    detail::require_positive<Real>(w.values(), "var_deriv_single");
    auto out = second_diff(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / w[i];
    return out;
}

/**
 * Discrete variational derivative of F_d between two densities:
 * -(d<2>(V_next + V_prev))_i / (V_next + V_prev)_i.
 *
 * Satisfies the discrete chain rule
 *   F_d[U_next] - F_d[U_prev] = h sum_i dF_i (U_next - U_prev)_i
 * exactly for every positive pair.
 */
template <std::floating_point Real>
NodalField<Real> var_deriv_pair(const DensityField<Real>& u_next, const DensityField<Real>& u_prev) {
    require_same_grid(u_next, u_prev, "var_deriv_pair");
    const auto& g = u_next.grid();
    std::vector<Real> sum(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        sum[i] = std::sqrt(u_next[i]) + std::sqrt(u_prev[i]);
        if (!(sum[i] > Real(0))) {
            throw DomainError("var_deriv_pair: vacuum at node " + std::to_string(i) +
                              " (V_next + V_prev = 0)");
        }
    }
    const SqrtField<Real> s(g, std::move(sum));
    auto out = second_diff(s);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / s[i];
    return out;
}

/// E_d = 2h sum_i (U_i - 2 sqrt(U_i) + 1).
template <std::floating_point Real>
Real discrete_entropy(const DensityField<Real>& u) {
    Real s = 0;
    for (Real ui : u.values()) {
        const Real d = std::sqrt(ui) - Real(1);
        s += d * d;
    }
    return Real(2) * u.grid().h() * s;
}

/// H_d(U,V)^2 = (h/2) sum_i (sqrt(U_i) - sqrt(V_i))^2.
template <std::floating_point Real>
Real discrete_hellinger_sq(const DensityField<Real>& u, const DensityField<Real>& v) {
    require_same_grid(u, v, "discrete_hellinger");
    Real s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Real d = std::sqrt(u[i]) - std::sqrt(v[i]);
        s += d * d;
    }
    return Real(0.5) * u.grid().h() * s;
}

template <std::floating_point Real>
Real discrete_hellinger(const DensityField<Real>& u, const DensityField<Real>& v) {
    return std::sqrt(discrete_hellinger_sq(u, v));
}

template <std::floating_point Real>
Real mass(const DensityField<Real>& u) {
    return quadrature(u);
}

template <std::floating_point Real>
StructureMetrics<Real> structure_metrics(const DensityField<Real>& u) {
    const auto ones = DensityField<Real>::constant(u.grid(), Real(1));
    StructureMetrics<Real> m;
    m.mass = mass(u);
    m.fisher = discrete_fisher(u);
    m.entropy = discrete_entropy(u);
    m.hellinger_to_steady = discrete_hellinger(u, ones);
    m.min_value = u.min();
    return m;
}

} // namespace dlss
