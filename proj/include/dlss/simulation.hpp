#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlss/functionals.hpp"
#include "dlss/newton.hpp"
#include "dlss/scheme.hpp"

namespace dlss {

enum class InitialKind { cos16_single, cos16_double, constant, custom_samples };

inline std::string to_string(InitialKind k) {
    switch (k) {
    case InitialKind::cos16_single: return "cos16-single";
    case InitialKind::cos16_double: return "cos16-double";
    case InitialKind::constant: return "constant";
    case InitialKind::custom_samples: return "custom-samples";
    }
    return "unknown";
}

inline InitialKind parse_initial_kind(const std::string& tag) {
    if (tag == "cos16-single") return InitialKind::cos16_single;
    if (tag == "cos16-double") return InitialKind::cos16_double;
    if (tag == "constant") return InitialKind::constant;
    if (tag == "custom-samples") return InitialKind::custom_samples;
    throw DomainError("unknown initial condition tag '" + tag + "'");
}

template <std::floating_point Real = double>
struct InitialCondition {
    InitialKind kind = InitialKind::cos16_single;
    std::vector<Real> samples; // raw nodal values, custom_samples only
};

/**
 * Sampled initial density, normalized so the discrete mass h*sum(U) is 1.
 *
 *   cos16-single: cos(pi x)^16 + 0.1
 *   cos16-double: cos(2 pi x)^16 + 0.01
 *   constant:     1
 *   custom:       the given samples (nonnegative, one per node)
 */
template <std::floating_point Real>
DensityField<Real> initial_condition(const InitialCondition<Real>& ic, const Grid<Real>& grid) {
    const std::size_t n = grid.n();
    std::vector<Real> raw(n);
    constexpr Real pi = std::numbers::pi_v<Real>;
    switch (ic.kind) {
    case InitialKind::cos16_single:
        for (std::size_t i = 0; i < n; ++i) raw[i] = std::pow(std::cos(pi * grid.node(i)), 16) + Real(0.1);
        break;
    case InitialKind::cos16_double:
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = std::pow(std::cos(Real(2) * pi * grid.node(i)), 16) + Real(0.01);
        break;
    case InitialKind::constant:
        raw.assign(n, Real(1));
        break;
    case InitialKind::custom_samples:
        if (ic.samples.size() != n) {
            throw DomainError("custom initial datum has " + std::to_string(ic.samples.size()) +
                              " samples for " + std::to_string(n) + " nodes");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(ic.samples[i] >= Real(0))) {
                throw DomainError("custom initial datum is negative at node " + std::to_string(i));
            }
        }
        raw = ic.samples;
        break;
    }
    const Real m = quadrature(NodalField<Real>(grid, raw));
    if (!(m > Real(0))) throw DomainError("initial datum has zero mass");
    for (Real& v : raw) v /= m;
    return {grid, std::move(raw)};
}

/// Number of whole steps of size tau needed to reach t (ceil, tolerant to rounding in t/tau).
template <std::floating_point Real>
std::int64_t steps_to_reach(Real t, Real tau) {
    const Real ratio = t / tau;
    const Real nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= Real(1e-9) * std::max(Real(1), ratio)) {
        return static_cast<std::int64_t>(nearest);
    }
    return static_cast<std::int64_t>(std::ceil(ratio));
}

template <std::floating_point Real = double>
struct SimulationConfig {
    SchemeParams<Real> scheme;
    NewtonParams<Real> newton{};
    InitialCondition<Real> initial{};
    Real t_end = Real(1.5e-3);
    std::vector<Real> snapshot_times{};
    int diagnostics_stride = 1;

    const Grid<Real>& grid() const noexcept { return scheme.grid(); }

    void validate() const {
        newton.validate();
        if (!(t_end > Real(0))) throw DomainError("t_end must be positive");
        if (diagnostics_stride < 1) throw DomainError("diagnostics stride must be at least 1");
        for (Real t : snapshot_times) {
            if (!(t >= Real(0)) || t > t_end * (Real(1) + Real(1e-12))) {
                throw DomainError("snapshot time " + std::to_string(t) + " lies outside [0, t_end]");
            }
        }
    }
};

/// Default snapshot times t1..t4 for the relaxation runs.
template <std::floating_point Real = double>
std::vector<Real> default_snapshot_times() {
    return {Real(5e-6), Real(4e-5), Real(2e-4), Real(1.5e-3)};
}

/// The configured initial density; its square root must clear the positivity floor.
template <std::floating_point Real>
DensityField<Real> initial_density(const SimulationConfig<Real>& cfg) {
    auto u = initial_condition(cfg.initial, cfg.grid());
    const Real floor = std::max(cfg.newton.positivity_floor, positivity_floor_w<Real>);
    if (!(std::sqrt(u.min()) > floor)) {
        throw DomainError("initial datum is not positive: min sqrt(u0) = " + std::to_string(std::sqrt(u.min())) +
                          " is at or below the positivity floor");
    }
    return u;
}

template <std::floating_point Real = double>
struct StepDiagnostics {
    std::int64_t step_index = 0;
    Real time = 0;
    StructureMetrics<Real> metrics{};
    NewtonReport<Real> newton{};
    int v_sign_flips = 0; // negative entries of 2W - V_prev
};

template <std::floating_point Real = double>
struct StepResult {
    DensityField<Real> u_next;
    SqrtField<Real> v_next; // signed 2W - V_prev
    StepDiagnostics<Real> diagnostics;
};

/**
 * One implicit step: solve for the midpoint W, then V_next = 2W - V_prev and
 * U_next = V_next^2. V_next keeps its sign; negative entries are counted.
 */
template <std::floating_point Real>
StepResult<Real> step(const DensityField<Real>& u_prev, const SqrtField<Real>& v_prev,
                      const SimulationConfig<Real>& cfg, std::int64_t step_index = 1) {
    require_same_grid(u_prev, v_prev, "step");
    auto sol = newton_step_solve(v_prev, cfg.scheme, cfg.newton, v_prev);
    const auto& g = u_prev.grid();
    std::vector<Real> v_next(g.n()), u_next(g.n());
    int flips = 0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        v_next[i] = Real(2) * sol.w[i] - v_prev[i];
        if (v_next[i] < Real(0)) ++flips;
        u_next[i] = v_next[i] * v_next[i];
    }
    DensityField<Real> u(g, std::move(u_next));
    StepDiagnostics<Real> diag;
    diag.step_index = step_index;
    diag.time = static_cast<Real>(step_index) * cfg.scheme.tau();
    diag.metrics = structure_metrics(u);
    diag.newton = std::move(sol.report);
    diag.v_sign_flips = flips;
    return {std::move(u), SqrtField<Real>(g, std::move(v_next)), std::move(diag)};
}

template <std::floating_point Real = double>
struct Snapshot {
    Real time;
    DensityField<Real> u;
};

template <std::floating_point Real = double>
struct Trajectory {
    SimulationConfig<Real> config;
    std::vector<Snapshot<Real>> snapshots;
    std::vector<StepDiagnostics<Real>> diagnostics;
    std::optional<DensityField<Real>> final_state;
    std::int64_t steps_taken = 0;
    bool failed = false;
    std::string failure;
};

/**
 * Run from the configured initial datum until t_end.
 *
 * Diagnostics are kept at step 0, every diagnostics_stride steps, at every
 * snapshot and at the final step. A Newton failure ends the run early and
 * returns what was computed so far with failed set.
 */
template <std::floating_point Real>
Trajectory<Real> run(const SimulationConfig<Real>& cfg) {
    cfg.validate();
    const Real tau = cfg.scheme.tau();
    const std::int64_t total = steps_to_reach(cfg.t_end, tau);

    std::vector<std::int64_t> snap_steps;
    for (Real t : cfg.snapshot_times) snap_steps.push_back(std::min(total, steps_to_reach(t, tau)));
    auto is_snapshot = [&](std::int64_t k) {
        return std::find(snap_steps.begin(), snap_steps.end(), k) != snap_steps.end();
    };

    Trajectory<Real> traj{cfg, {}, {}, std::nullopt, 0, false, {}};
    DensityField<Real> u = initial_density(cfg);
    std::vector<Real> v0(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v0[i] = std::sqrt(u[i]);
    SqrtField<Real> v(cfg.grid(), std::move(v0));

    StepDiagnostics<Real> d0;
    d0.metrics = structure_metrics(u);
    d0.newton.converged = true;
    d0.newton.final_residual_norm = 0;
    traj.diagnostics.push_back(d0);
    if (is_snapshot(0)) traj.snapshots.push_back({Real(0), u});

    for (std::int64_t k = 1; k <= total; ++k) {
        try {
            auto res = step(u, v, cfg, k);
            u = std::move(res.u_next);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(res.v_next[i]);
            traj.steps_taken = k;
            const bool snap = is_snapshot(k);
            if (snap || k % cfg.diagnostics_stride == 0 || k == total) {
                traj.diagnostics.push_back(std::move(res.diagnostics));
            }
            if (snap) traj.snapshots.push_back({static_cast<Real>(k) * tau, u});
        } catch (const NewtonError<Real>& e) {
            traj.failed = true;
            traj.failure = "step " + std::to_string(k) + ": " + e.what();
            break;
        }
    }
    traj.final_state = u;
    return traj;
}

} // namespace dlss
