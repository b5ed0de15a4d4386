// One implicit step by hand: Newton for the midpoint, then V_next = 2W - V.

#include <cmath>
#include <cstdio>
#include <vector>

#include "dlss/dlss.hpp"

int main() {
    using namespace dlss;

    const Grid<double> grid(64);
    const SchemeParams<double> params(grid, 1e-7, 1.0);

    const auto u0 = initial_condition(InitialCondition<double>{InitialKind::cos16_single, {}}, grid);
    std::vector<double> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] = std::sqrt(u0[i]);
    const SqrtField<double> v0(grid, v);

    const auto sol = newton_step_solve(v0, params, NewtonParams<double>{}, v0);
    std::printf("newton: %d updates, |R| = %.3e\n", sol.report.iterations, sol.report.final_residual_norm);

    std::vector<double> u1(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double vn = 2 * sol.w[i] - v0[i];
        u1[i] = vn * vn;
    }
    const DensityField<double> next(grid, u1);
    std::printf("mass   %.16f -> %.16f\n", mass(u0), mass(next));
    std::printf("fisher %.10e -> %.10e\n", discrete_fisher(u0), discrete_fisher(next));
}
