#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlss/functionals.hpp"
#include "dlss/simulation.hpp"

namespace dlss {

/// Samples of a fine-grid field at the nodes of a coarser nested grid.
template <std::floating_point Real>
DensityField<Real> restrict_to(const DensityField<Real>& fine, const Grid<Real>& coarse) {
    const std::size_t nf = fine.grid().n();
    const std::size_t nc = coarse.n();
    if (nc > nf || nf % nc != 0) {
        throw DomainError("node sets are not nested: " + std::to_string(nc) + " nodes are not a subset of " +
                          std::to_string(nf));
    }
    const std::size_t stride = nf / nc;
    std::vector<Real> v(nc);
    for (std::size_t i = 0; i < nc; ++i) v[i] = fine[i * stride];
    return {coarse, std::move(v)};
}

/// Hellinger distance between a reference and a numerical solution, on the numerical grid.
template <std::floating_point Real>
Real error_at(const DensityField<Real>& u_ref, const DensityField<Real>& u_num) {
    if (u_ref.grid() == u_num.grid()) return discrete_hellinger(u_ref, u_num);
    return discrete_hellinger(restrict_to(u_ref, u_num.grid()), u_num);
}

template <std::floating_point Real>
Real error_at_sq(const DensityField<Real>& u_ref, const DensityField<Real>& u_num) {
    if (u_ref.grid() == u_num.grid()) return discrete_hellinger_sq(u_ref, u_num);
    return discrete_hellinger_sq(restrict_to(u_ref, u_num.grid()), u_num);
}

/// rate_j = ln(e_j / e_{j-1}) / ln(p_j / p_{j-1}); the first entry has no rate.
template <std::floating_point Real>
std::vector<std::optional<Real>> observed_rates(const std::vector<Real>& params, const std::vector<Real>& errors) {
    if (params.size() != errors.size()) throw DomainError("observed_rates: size mismatch");
    std::vector<std::optional<Real>> rates(params.size());
    for (std::size_t j = 1; j < params.size(); ++j) {
        rates[j] = std::log(errors[j] / errors[j - 1]) / std::log(params[j] / params[j - 1]);
    }
    return rates;
}

enum class StudyKind { time, space };

inline std::string to_string(StudyKind k) { return k == StudyKind::time ? "time" : "space"; }

template <std::floating_point Real = double>
struct ConvergenceRow {
    Real parameter;  // tau for time studies, h for space studies
    Real error;      // H_d
    Real error_sq;   // H_d^2
    std::optional<Real> rate;
};

template <std::floating_point Real = double>
struct ConvergenceReport {
    StudyKind kind = StudyKind::time;
    Real reference_parameter = 0; // tau_ref or h_ref
    Real fixed_parameter = 0;     // h for time studies, tau for space studies
    Real delta = 1;
    InitialKind initial = InitialKind::cos16_single;
    Real t_compare = 0;
    std::vector<ConvergenceRow<Real>> rows;
};

/// A member run failed; carries the rows completed before the failure.
template <std::floating_point Real = double>
class StudyError : public std::runtime_error {
public:
    StudyError(const std::string& what, ConvergenceReport<Real> partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const ConvergenceReport<Real>& partial() const noexcept { return partial_; }

private:
    ConvergenceReport<Real> partial_;
};

template <std::floating_point Real = double>
struct TimeStudySpec {
    std::size_t n = 500; // h = 2e-3
    Real tau_ref = Real(1e-9);
    std::vector<Real> taus{Real(1e-8), Real(2e-8), Real(4e-8), Real(8e-8), Real(1e-7),
                           Real(2e-7), Real(4e-7), Real(5e-7), Real(1e-6)};
    Real delta = 1;
    InitialCondition<Real> initial{};
    Real t_compare = Real(5e-5);
    NewtonParams<Real> newton{};
};

template <std::floating_point Real = double>
struct SpaceStudySpec {
    std::vector<std::size_t> ns{64, 128, 256, 512};
    std::size_t n_ref = 2048;
    Real tau = Real(1e-8);
    Real delta = 1;
    InitialCondition<Real> initial{};
    Real t_compare = Real(5e-5);
    NewtonParams<Real> newton{};
};

namespace detail {

// State at t (a whole number of steps), or nullopt plus the failure message.
template <std::floating_point Real>
std::pair<std::optional<DensityField<Real>>, std::string>
solve_until(std::size_t n, Real tau, Real delta, const InitialCondition<Real>& ic, Real t,
            const NewtonParams<Real>& newton) {
    SimulationConfig<Real> cfg{SchemeParams<Real>(Grid<Real>(n), tau, delta), newton, ic, t, {}, 1};
    cfg.diagnostics_stride = static_cast<int>(std::max<std::int64_t>(1, steps_to_reach(t, tau)));
    auto traj = run(cfg);
    if (traj.failed) return {std::nullopt, traj.failure};
    return {std::move(traj.final_state), {}};
}

template <std::floating_point Real>
void require_whole_steps(Real t, Real tau) {
    const Real ratio = t / tau;
    if (std::abs(ratio - std::round(ratio)) > Real(1e-9) * std::max(Real(1), ratio)) {
        throw DomainError("comparison time " + std::to_string(t) + " is not a whole number of steps of " +
                          std::to_string(tau));
    }
}

template <std::floating_point Real>
void fill_rates(ConvergenceReport<Real>& report) {
    std::sort(report.rows.begin(), report.rows.end(),
              [](const auto& a, const auto& b) { return a.parameter < b.parameter; });
    std::vector<Real> p, e;
    for (const auto& r : report.rows) {
        p.push_back(r.parameter);
        e.push_back(r.error);
    }
    const auto rates = observed_rates(p, e);
    for (std::size_t j = 0; j < report.rows.size(); ++j) report.rows[j].rate = rates[j];
}

} // namespace detail

/**
 * Temporal convergence: a reference run at tau_ref on the study grid is
 * compared with runs at each tau at t_compare. Errors are the unsquared
 * discrete Hellinger distance; the squared value is kept alongside.
 */
template <std::floating_point Real>
ConvergenceReport<Real> convergence_time_study(const TimeStudySpec<Real>& spec) {
    ConvergenceReport<Real> report;
    report.kind = StudyKind::time;
    report.reference_parameter = spec.tau_ref;
    report.fixed_parameter = Real(1) / static_cast<Real>(spec.n);
    report.delta = spec.delta;
    report.initial = spec.initial.kind;
    report.t_compare = spec.t_compare;
    if (spec.taus.empty()) throw DomainError("time study needs at least one tau");
    detail::require_whole_steps(spec.t_compare, spec.tau_ref);
    for (Real tau : spec.taus) detail::require_whole_steps(spec.t_compare, tau);

    auto [ref, why] = detail::solve_until(spec.n, spec.tau_ref, spec.delta, spec.initial, spec.t_compare, spec.newton);
    if (!ref) throw StudyError<Real>("time study reference run failed: " + why, report);

    std::vector<Real> taus = spec.taus;
    std::sort(taus.begin(), taus.end());
    for (Real tau : taus) {
        auto [u, msg] = detail::solve_until(spec.n, tau, spec.delta, spec.initial, spec.t_compare, spec.newton);
        if (!u) {
            detail::fill_rates(report);
            throw StudyError<Real>("time study run at tau=" + std::to_string(tau) + " failed: " + msg, report);
        }
        report.rows.push_back({tau, error_at(*ref, *u), error_at_sq(*ref, *u), std::nullopt});
    }
    detail::fill_rates(report);
    return report;
}

/**
 * Spatial convergence on nested grids: every n must divide n_ref, and the
 * reference is restricted to the coarse nodes (no interpolation).
 */
template <std::floating_point Real>
ConvergenceReport<Real> convergence_space_study(const SpaceStudySpec<Real>& spec) {
    ConvergenceReport<Real> report;
    report.kind = StudyKind::space;
    report.reference_parameter = Real(1) / static_cast<Real>(spec.n_ref);
    report.fixed_parameter = spec.tau;
    report.delta = spec.delta;
    report.initial = spec.initial.kind;
    report.t_compare = spec.t_compare;
    if (spec.ns.empty()) throw DomainError("space study needs at least one grid");
    for (std::size_t n : spec.ns) {
        if (n < Grid<Real>::min_nodes || n > spec.n_ref || spec.n_ref % n != 0) {
            throw DomainError("space sweep is not nested: n=" + std::to_string(n) +
                              " does not divide n_ref=" + std::to_string(spec.n_ref));
        }
    }
    detail::require_whole_steps(spec.t_compare, spec.tau);
    if (spec.initial.kind == InitialKind::custom_samples) {
        throw DomainError("space study needs an analytic initial datum");
    }

    auto [ref, why] = detail::solve_until(spec.n_ref, spec.tau, spec.delta, spec.initial, spec.t_compare, spec.newton);
    if (!ref) throw StudyError<Real>("space study reference run failed: " + why, report);

    for (std::size_t n : spec.ns) {
        auto [u, msg] = detail::solve_until(n, spec.tau, spec.delta, spec.initial, spec.t_compare, spec.newton);
        if (!u) {
            detail::fill_rates(report);
            throw StudyError<Real>("space study run at n=" + std::to_string(n) + " failed: " + msg, report);
        }
        const Real h = Real(1) / static_cast<Real>(n);
        report.rows.push_back({h, error_at(*ref, *u), error_at_sq(*ref, *u), std::nullopt});
    }
    detail::fill_rates(report);
    return report;
}

// -- relaxation ----------------------------------------------------------------

template <std::floating_point Real = double>
struct DecayFitReport {
    Real t_a = 0;
    Real t_b = 0;
    std::size_t samples = 0;
    Real lambda_empirical = 0; // minus the slope of log E_d against t; positive means decay
    Real r_squared = 0;
    bool degenerate = false;   // E_d vanished in the window; lambda is +inf
};

template <std::floating_point Real = double>
struct EntropySeries {
    std::vector<Real> times;
    std::vector<Real> entropy;
};

template <std::floating_point Real>
EntropySeries<Real> entropy_series(const Trajectory<Real>& traj) {
    EntropySeries<Real> s;
    for (const auto& d : traj.diagnostics) {
        s.times.push_back(d.time);
        s.entropy.push_back(d.metrics.entropy);
    }
    return s;
}

/// Default fit window: the last two thirds of the recorded span.
template <std::floating_point Real>
std::pair<Real, Real> default_decay_window(const EntropySeries<Real>& s) {
    if (s.times.empty()) throw DomainError("empty entropy series");
    const Real t0 = s.times.front();
    const Real t1 = s.times.back();
    return {t0 + (t1 - t0) / Real(3), t1};
}

/**
 * Least-squares line through (t, log E_d) over [t_a, t_b]. Needs at least
 * ten samples in the window. If E_d vanishes anywhere in the window the
 * state is already steady and a degenerate report is returned.
 */
template <std::floating_point Real>
DecayFitReport<Real> decay_fit(const EntropySeries<Real>& s, Real t_a, Real t_b) {
    if (s.times.size() != s.entropy.size()) throw DomainError("decay_fit: series size mismatch");
    if (!(t_a < t_b)) throw DomainError("decay_fit: empty window");
    // Window bounds are compared with a little slack so step times k*tau hit them.
    const Real slack = Real(1e-9) * std::max(std::abs(t_a), std::abs(t_b));
    std::vector<Real> t, y;
    bool vanished = false;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (s.times[i] < t_a - slack || s.times[i] > t_b + slack) continue;
        if (s.entropy[i] < Real(0)) throw DomainError("decay_fit: negative entropy sample");
        if (s.entropy[i] == Real(0)) vanished = true;
        t.push_back(s.times[i]);
        y.push_back(s.entropy[i] > Real(0) ? std::log(s.entropy[i]) : Real(0));
    }
    DecayFitReport<Real> rep;
    rep.t_a = t_a;
    rep.t_b = t_b;
    rep.samples = t.size();
    if (t.size() < 10) {
        throw DomainError("decay_fit: window holds " + std::to_string(t.size()) + " samples, need at least 10");
    }
    if (vanished) {
        rep.degenerate = true;
        rep.lambda_empirical = std::numeric_limits<Real>::infinity();
        rep.r_squared = 1;
        return rep;
    }
    const auto m = static_cast<Real>(t.size());
    Real tm = 0, ym = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= m;
    ym /= m;
    Real stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    const Real slope = sty / stt;
    rep.lambda_empirical = -slope;
    rep.r_squared = syy > Real(0) ? std::clamp(sty * sty / (stt * syy), Real(0), Real(1)) : Real(1);
    return rep;
}

template <std::floating_point Real>
DecayFitReport<Real> decay_fit(const EntropySeries<Real>& s) {
    const auto [a, b] = default_decay_window(s);
    return decay_fit(s, a, b);
}

/// Sup-norm distance of a density from the steady state 1.
template <std::floating_point Real>
Real distance_to_steady_sup(const DensityField<Real>& u) {
    Real m = 0;
    for (Real v : u.values()) m = std::max(m, std::abs(v - Real(1)));
    return m;
}

} // namespace dlss
