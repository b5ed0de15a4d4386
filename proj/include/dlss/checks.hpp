#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dlss/functionals.hpp"
#include "dlss/grid.hpp"
#include "dlss/scheme.hpp"

// Randomized suites for the exact discrete identities the scheme rests on.
// Each suite reports the worst deviation over its trials against a fixed
// threshold.

namespace dlss::checks {

struct SuiteResult {
    std::string name;
    int trials = 0;
    double worst = 0;
    double threshold = 0;
    bool passed = false;
};

/// Platform-independent uniform draws from a seeded mt19937_64.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    std::vector<double> field(std::size_t n, double lo = 0.1, double hi = 2.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

inline constexpr std::array<std::size_t, 3> default_sizes{8, 16, 64};

namespace detail {

inline double rel(double a, double b, double scale) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale});
}

inline double h_dot(std::span<const double> x, std::span<const double> y, double h) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return h * s;
}

inline SuiteResult finish(std::string name, int trials, double worst, double threshold) {
    return {std::move(name), trials, worst, threshold, worst <= threshold};
}

} // namespace detail

/// F_d[U1] - F_d[U0] against h sum dF(U1,U0) (U1 - U0), relative to max(F_d).
inline SuiteResult chain_rule(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const DensityField<double> u1(g, rng.field(g.n()));
        const DensityField<double> u0(g, rng.field(g.n()));
        const double f1 = discrete_fisher(u1), f0 = discrete_fisher(u0);
        const auto dfd = var_deriv_pair(u1, u0);
        std::vector<double> du(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) du[i] = u1[i] - u0[i];
        const double rhs = detail::h_dot(dfd.values(), du, g.h());
        worst = std::max(worst, std::abs((f1 - f0) - rhs) / std::max({f1, f0, 1e-300}));
    }
    return detail::finish("discrete chain rule", trials, worst, 1e-12);
}

/// <A_d(w) - A_d(W), w - W>_h against h sum w W (dF(w) - dF(W))^2.
inline SuiteResult ad_monotonicity_identity(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const SqrtField<double> w(g, rng.field(g.n()));
        const SqrtField<double> big_w(g, rng.field(g.n()));
        const auto aw = op_Ad(w), abw = op_Ad(big_w);
        const auto fw = var_deriv_single(w), fbw = var_deriv_single(big_w);
        double lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            lhs += (aw[i] - abw[i]) * (w[i] - big_w[i]);
            const double d = fw[i] - fbw[i];
            rhs += w[i] * big_w[i] * d * d;
        }
        worst = std::max(worst, detail::rel(g.h() * lhs, g.h() * rhs, 1e-300));
    }
    return detail::finish("A_d monotonicity identity", trials, worst, 1e-11);
}

/// Negative part of <A_d(w) - A_d(W), w - W>_h relative to its absolute-sum scale.
inline SuiteResult ad_monotonicity_sign(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const SqrtField<double> w(g, rng.field(g.n()));
        // Nearby pairs make the inner product small, which is the hard case for the sign.
        std::vector<double> near(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) near[i] = w[i] * (1.0 + rng.uniform(-1e-3, 1e-3));
        const SqrtField<double> big_w(g, std::move(near));
        const auto aw = op_Ad(w), abw = op_Ad(big_w);
        double dot = 0, scale = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            const double term = (aw[i] - abw[i]) * (w[i] - big_w[i]);
            dot += term;
            scale += std::abs(term);
        }
        worst = std::max(worst, std::max(0.0, -dot) / std::max(scale, 1e-300));
    }
    return detail::finish("A_d monotonicity sign", trials, worst, 1e-12);
}

/// residual_structural against residual_expanded at random (W, V, tau, delta).
inline SuiteResult residual_equivalence(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const SchemeParams<double> p(g, std::pow(10.0, rng.uniform(-8, -2)), rng.uniform(0, 100));
        const SqrtField<double> w(g, rng.field(g.n()));
        const SqrtField<double> v(g, rng.field(g.n()));
        const auto rs = residual_structural(w, v, p);
        const auto re = residual_expanded(w, v, p);
        double diff = 0, scale = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            diff = std::max(diff, std::abs(rs[i] - re[i]));
            scale = std::max({scale, std::abs(rs[i]), std::abs(re[i])});
        }
        worst = std::max(worst, diff / std::max(scale, 1e-300));
    }
    return detail::finish("residual structural == expanded", trials, worst, 1e-11);
}

/// Analytic Jacobian against central differences of residual_expanded.
inline SuiteResult jacobian_finite_difference(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const SchemeParams<double> p(g, std::pow(10.0, rng.uniform(-8, -3)), rng.uniform(0, 100));
        const SqrtField<double> w(g, rng.field(g.n(), 0.5, 2.0));
        const SqrtField<double> v(g, rng.field(g.n()));
        const auto jac = to_dense(jacobian_expanded(w, p));
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double eps = 1e-5 * std::max(1.0, std::abs(w[j]));
            SqrtField<double> wp = w, wm = w;
            wp[j] += eps;
            wm[j] -= eps;
            const auto rp = residual_expanded(wp, v, p);
            const auto rm = residual_expanded(wm, v, p);
            for (std::size_t i = 0; i < g.n(); ++i) {
                const double fd = (rp[i] - rm[i]) / (2 * eps);
                worst = std::max(worst, std::abs(fd - jac(i, j)) / std::max({std::abs(jac(i, j)), 1.0}));
            }
        }
    }
    return detail::finish("Jacobian vs central differences", trials, worst, 1e-6);
}

/// Summation by parts sum f d+g = -sum (d-f) g and telescoping of d+ and d<1>.
inline SuiteResult summation_by_parts(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const NodalField<double> f(g, rng.field(g.n(), -1.0, 1.0));
        const NodalField<double> k(g, rng.field(g.n(), -1.0, 1.0));
        const auto dpk = fwd_diff(k);
        const auto dmf = bwd_diff(f);
        double lhs = 0, rhs = 0, scale = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            lhs += f[i] * dpk[i];
            rhs -= dmf[i] * k[i];
            scale += std::abs(f[i] * dpk[i]) + std::abs(dmf[i] * k[i]);
        }
        worst = std::max(worst, std::abs(lhs - rhs) / scale);

        const auto dp = fwd_diff(f);
        const auto dc = central_diff(f);
        double sp = 0, sc = 0, fmax = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            sp += dp[i];
            sc += dc[i];
            fmax = std::max(fmax, std::abs(f[i]));
        }
        const double tel_scale = fmax / g.h();
        worst = std::max({worst, std::abs(sp) / tel_scale, std::abs(sc) / tel_scale});
    }
    return detail::finish("summation by parts / telescoping", trials, worst, 1e-13);
}

/// h sum 2 W_i rhs(W)_i = 0: the step cannot change the discrete mass.
inline SuiteResult mass_neutrality(Sampler& rng, int trials) {
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        const Grid<double> g(default_sizes[static_cast<std::size_t>(t) % default_sizes.size()]);
        const SqrtField<double> w(g, rng.field(g.n()));
        const auto rhs = scheme_rhs(w, rng.uniform(0, 100));
        double s = 0, scale = 0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            s += 2 * w[i] * rhs[i];
            scale += std::abs(2 * w[i] * rhs[i]);
        }
        worst = std::max(worst, std::abs(s) / std::max(scale, 1e-300));
    }
    return detail::finish("mass neutrality of the step", trials, worst, 1e-11);
}

/// Every suite with the same seed; trials must be positive.
inline std::vector<SuiteResult> run_all(std::uint64_t seed, int trials) {
    if (trials < 1) throw DomainError("identity suites need at least one trial");
    std::vector<SuiteResult> out;
    Sampler rng(seed);
    out.push_back(chain_rule(rng, trials));
    out.push_back(ad_monotonicity_identity(rng, trials));
    out.push_back(ad_monotonicity_sign(rng, trials));
    out.push_back(residual_equivalence(rng, trials));
    out.push_back(jacobian_finite_difference(rng, trials));
    out.push_back(summation_by_parts(rng, trials));
    out.push_back(mass_neutrality(rng, trials));
    return out;
}

} // namespace dlss::checks
