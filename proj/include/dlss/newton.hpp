#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlss/penta.hpp"
#include "dlss/scheme.hpp"

namespace dlss {

enum class LinearSolverKind {
    bordered_banded, // banded LU + rank-4 Woodbury correction
    dense_lu,        // O(N^3) reference path
};

template <std::floating_point Real = double>
struct NewtonParams {
    Real tol_residual = Real(1e-11); // absolute, infinity norm
    int max_iter = 25;
    Real damping_min = Real(1) / Real(1 << 20);
    Real positivity_floor = Real(1e-12);
    LinearSolverKind linear_solver = LinearSolverKind::bordered_banded;

    void validate() const {
        if (!(tol_residual > Real(0))) throw DomainError("newton tolerance must be positive");
        if (max_iter < 1) throw DomainError("newton max_iter must be at least 1");
        if (!(damping_min > Real(0)) || !(damping_min <= Real(1)))
            throw DomainError("newton damping_min must lie in (0, 1]");
        if (!(positivity_floor >= Real(0))) throw DomainError("newton positivity floor must be nonnegative");
    }
};

template <std::floating_point Real = double>
struct NewtonReport {
    bool converged = false;
    int iterations = 0; // accepted Newton updates
    Real final_residual_norm = std::numeric_limits<Real>::quiet_NaN();
    int damping_events = 0; // step halvings
    Real effective_tolerance = 0; // max(tol_residual, roundoff level of the last Jacobian)
    std::vector<Real> residual_history; // ||R||_inf before each update and after the last
};

enum class NewtonFailure { non_convergence, floor_violation, singular_jacobian };

template <std::floating_point Real = double>
class NewtonError : public std::runtime_error {
public:
    NewtonError(NewtonFailure kind, NewtonReport<Real> report, const std::string& what)
        : std::runtime_error(what), kind_(kind), report_(std::move(report)) {}

    NewtonFailure kind() const noexcept { return kind_; }
    const NewtonReport<Real>& report() const noexcept { return report_; }

private:
    NewtonFailure kind_;
    NewtonReport<Real> report_;
};

template <std::floating_point Real = double>
struct NewtonSolution {
    SqrtField<Real> w;
    NewtonReport<Real> report;
};

namespace detail {

template <std::floating_point Real>
Real inf_norm(std::span<const std::type_identity_t<Real>> x) {
    Real m = 0;
    for (Real v : x) m = std::max(m, std::abs(v));
    return m;
}

/// Residual level set by the representable spacing of W: eps * ||J||_inf * max|W|.
template <std::floating_point Real>
Real roundoff_level(const CyclicPentaMatrix<Real>& jac, const SqrtField<Real>& w) {
    Real row_max = 0;
    for (std::size_t i = 0; i < jac.n(); ++i) {
        Real row = 0;
        for (int k = -2; k <= 2; ++k) row += std::abs(jac.at(i, k));
        row_max = std::max(row_max, row);
    }
    Real w_max = 0;
    for (Real v : w.values()) w_max = std::max(w_max, std::abs(v));
    return std::numeric_limits<Real>::epsilon() * row_max * w_max;
}

} // namespace detail

/**
 * Damped Newton iteration for the midpoint unknown W of one implicit step.
 *
 * Each iteration solves J d = -R and halves the step (down to damping_min)
 * while the trial iterate would touch the positivity floor or raise
 * ||R||_inf. The stopping test is ||R||_inf <= max(tol_residual, roundoff
 * level), followed by a single extra full update unless R is already at the
 * unit roundoff of W. Throws NewtonError on exhaustion, on a singular
 * Jacobian, or when no admissible damped step exists.
 */
template <std::floating_point Real>
NewtonSolution<Real> newton_step_solve(const SqrtField<Real>& v_prev, const SchemeParams<Real>& p,
                                       const NewtonParams<Real>& np, const SqrtField<Real>& guess) {
    np.validate();
    require_same_grid(v_prev, guess, "newton_step_solve");
    for (std::size_t i = 0; i < guess.size(); ++i) {
        if (!(guess[i] > np.positivity_floor)) {
            throw DomainError("newton_step_solve: initial guess is not above the positivity floor at node " +
                              std::to_string(i));
        }
    }

    NewtonReport<Real> report;
    SqrtField<Real> w = guess;
    auto r = residual_expanded(w, v_prev, p);
    Real rn = detail::inf_norm<Real>(r.values());
    report.residual_history.push_back(rn);

    const std::size_t n = w.size();
    std::vector<Real> d(n);
    bool polishing = false;
    while (true) {
        const auto jac = jacobian_expanded(w, p);
        const Real level = detail::roundoff_level(jac, w);
        report.effective_tolerance = std::max(np.tol_residual, level);
        const bool within = rn <= report.effective_tolerance;
        if (within && (polishing || rn <= std::numeric_limits<Real>::epsilon() * detail::inf_norm<Real>(w.values()))) {
            report.converged = true;
            break;
        }
        if (report.iterations >= np.max_iter) {
            if (within) {
                report.converged = true;
                break;
            }
            report.final_residual_norm = rn;
            throw NewtonError<Real>(NewtonFailure::non_convergence, std::move(report),
                                    "newton: no convergence within " + std::to_string(np.max_iter) +
                                        " iterations (residual " + std::to_string(rn) + ")");
        }
        // Once below tolerance one more full update is taken: the remaining
        // Newton error is smooth and would otherwise leak into the mass.
        polishing = within;

        std::vector<Real> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
        try {
            d = np.linear_solver == LinearSolverKind::dense_lu ? dense_lu_solve(to_dense(jac), std::move(rhs))
                                                                : solve_cyclic_penta(jac, rhs);
        } catch (const SingularMatrixError& e) {
            report.final_residual_norm = rn;
            throw NewtonError<Real>(NewtonFailure::singular_jacobian, std::move(report),
                                    std::string("newton: ") + e.what());
        }

        Real lambda = 1;
        bool accepted = false;
        bool floor_blocked = false;
        while (lambda >= np.damping_min) {
            SqrtField<Real> trial = w;
            Real trial_min = std::numeric_limits<Real>::max();
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = w[i] + lambda * d[i];
                trial_min = std::min(trial_min, trial[i]);
            }
            if (trial_min > np.positivity_floor && trial_min > positivity_floor_w<Real>) {
                auto trial_r = residual_expanded(trial, v_prev, p);
                const Real trial_rn = detail::inf_norm<Real>(trial_r.values());
                // A polishing update only has to stay inside the tolerance band;
                // near the roundoff level ||R|| no longer tracks the error in W.
                if (trial_rn <= rn || (polishing && trial_rn <= report.effective_tolerance)) {
                    w = std::move(trial);
                    r = std::move(trial_r);
                    rn = trial_rn;
                    accepted = true;
                    break;
                }
            } else {
                floor_blocked = true;
            }
            if (polishing) break;
            lambda *= Real(0.5);
            ++report.damping_events;
        }
        if (!accepted) {
            if (polishing) {
                report.converged = true;
                break;
            }
            report.final_residual_norm = rn;
            const auto kind = floor_blocked ? NewtonFailure::floor_violation : NewtonFailure::non_convergence;
            throw NewtonError<Real>(kind, std::move(report),
                                    floor_blocked ? "newton: no damped step keeps W above the positivity floor"
                                                  : "newton: no damped step reduces the residual");
        }
        ++report.iterations;
        report.residual_history.push_back(rn);
    }
    report.final_residual_norm = rn;
    return {std::move(w), std::move(report)};
}

} // namespace dlss
