#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dlss/newton.hpp"
#include "dlss/simulation.hpp"

using namespace dlss;

namespace {

SqrtField<double> sqrt_of(const DensityField<double>& u) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = std::sqrt(u[i]);
    return {u.grid(), std::move(v)};
}

SqrtField<double> datum_sqrt(std::size_t n, InitialKind kind = InitialKind::cos16_single) {
    return sqrt_of(initial_condition(InitialCondition<double>{kind, {}}, Grid<double>(n)));
}

} // namespace

TEST(NewtonParams, Validation) {
    NewtonParams<double> np;
    EXPECT_NO_THROW(np.validate());
    np.tol_residual = 0;
    EXPECT_THROW(np.validate(), DomainError);
    np = {};
    np.max_iter = 0;
    EXPECT_THROW(np.validate(), DomainError);
    np = {};
    np.damping_min = 2;
    EXPECT_THROW(np.validate(), DomainError);
}

TEST(Newton, SteadyStateNeedsNoUpdate) {
    const Grid<double> g(64);
    const auto ones = SqrtField<double>::constant(g, 1.0);
    const auto sol = newton_step_solve(ones, SchemeParams<double>(g, 1e-6, 1.0), NewtonParams<double>{}, ones);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_EQ(sol.report.iterations, 0);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(sol.w[i], 1.0);
}

TEST(Newton, ConvergesFromPreviousStateOnDatum) {
    const auto v = datum_sqrt(200);
    const SchemeParams<double> p(v.grid(), 1e-6, 1.0);
    const auto sol = newton_step_solve(v, p, NewtonParams<double>{}, v);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_LE(sol.report.iterations, 10);
    EXPECT_EQ(sol.report.damping_events, 0);
    EXPECT_LE(sol.report.final_residual_norm, 1e-11);
    EXPECT_GT(sol.w.min(), 1e-12);
}

TEST(Newton, StepConservesMass) {
    const auto v = datum_sqrt(200);
    const SchemeParams<double> p(v.grid(), 1e-6, 1.0);
    const auto sol = newton_step_solve(v, p, NewtonParams<double>{}, v);
    double before = 0, after = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        before += v[i] * v[i];
        const double vn = 2 * sol.w[i] - v[i];
        after += vn * vn;
    }
    EXPECT_NEAR(after * v.grid().h(), before * v.grid().h(), 1e-11);
}

TEST(Newton, QuadraticTail) {
    // Consecutive residuals above the tolerance band: r_{k+1} <= C r_k^2.
    const Grid<double> g(200);
    SimulationConfig<double> cfg{SchemeParams<double>(g, 1e-6, 1.0)};
    auto u = initial_condition(cfg.initial, g);
    auto v = sqrt_of(u);
    double worst_c = 0;
    for (int k = 1; k <= 40; ++k) {
        const auto sol = newton_step_solve(v, cfg.scheme, cfg.newton, v);
        const auto& hist = sol.report.residual_history;
        for (std::size_t j = 0; j + 1 < hist.size(); ++j) {
            if (hist[j] <= sol.report.effective_tolerance || hist[j + 1] <= sol.report.effective_tolerance) continue;
            worst_c = std::max(worst_c, hist[j + 1] / (hist[j] * hist[j]));
        }
        for (std::size_t i = 0; i < g.n(); ++i) v[i] = std::abs(2 * sol.w[i] - v[i]);
    }
    EXPECT_LE(worst_c, 1e8);
}

TEST(Newton, LinearSolverPathIndependence) {
    for (auto kind : {InitialKind::cos16_single, InitialKind::cos16_double}) {
        const auto v = datum_sqrt(64, kind);
        const SchemeParams<double> p(v.grid(), 1e-5, 10.0);
        NewtonParams<double> banded, dense;
        dense.linear_solver = LinearSolverKind::dense_lu;
        const auto a = newton_step_solve(v, p, banded, v);
        const auto b = newton_step_solve(v, p, dense, v);
        double diff = 0;
        for (std::size_t i = 0; i < 64; ++i) diff = std::max(diff, std::abs(a.w[i] - b.w[i]));
        EXPECT_LE(diff, 1e-9);
    }
}

TEST(Newton, IterationCapRaisesNonConvergence) {
    const auto v = datum_sqrt(200);
    const SchemeParams<double> p(v.grid(), 1e-4, 1.0);
    NewtonParams<double> np;
    np.max_iter = 1;
    try {
        newton_step_solve(v, p, np, v);
        FAIL() << "expected NewtonError";
    } catch (const NewtonError<double>& e) {
        EXPECT_EQ(e.kind(), NewtonFailure::non_convergence);
        EXPECT_FALSE(e.report().converged);
        EXPECT_EQ(e.report().iterations, 1);
        EXPECT_GT(e.report().final_residual_norm, 1e-11);
    }
}

TEST(Newton, GuessBelowFloorIsRejected) {
    const Grid<double> g(8);
    const auto ones = SqrtField<double>::constant(g, 1.0);
    auto guess = ones;
    guess[2] = 0.0;
    EXPECT_THROW(newton_step_solve(ones, SchemeParams<double>(g, 1e-6, 1.0), NewtonParams<double>{}, guess),
                 DomainError);
}

TEST(Newton, GridMismatchIsRejected) {
    const auto a = SqrtField<double>::constant(Grid<double>(8), 1.0);
    const auto b = SqrtField<double>::constant(Grid<double>(9), 1.0);
    EXPECT_THROW(newton_step_solve(a, SchemeParams<double>(Grid<double>(8), 1e-6, 1.0), NewtonParams<double>{}, b),
                 DomainError);
}

TEST(Newton, FineGridReferenceStepConverges) {
    // Residual roundoff at n=2048, tau=1e-8 sits above 1e-11; the
    // effective tolerance must take over.
    const auto v = datum_sqrt(2048);
    const SchemeParams<double> p(v.grid(), 1e-8, 1.0);
    const auto sol = newton_step_solve(v, p, NewtonParams<double>{}, v);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_GT(sol.report.effective_tolerance, 1e-11);
    EXPECT_LE(sol.report.final_residual_norm, sol.report.effective_tolerance);
}
