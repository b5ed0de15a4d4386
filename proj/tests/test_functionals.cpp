#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dlss/functionals.hpp"
#include "dlss/simulation.hpp"

using namespace dlss;

namespace {

std::vector<double> positive(std::size_t n, std::mt19937_64& gen, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

// F_d written out from its definition with explicit index arithmetic.
double fisher_oracle(const std::vector<double>& u) {
    const std::size_t n = u.size();
    const double h = 1.0 / static_cast<double>(n);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::sqrt(u[i]);
        const double vp = std::sqrt(u[(i + 1) % n]);
        const double vm = std::sqrt(u[(i + n - 1) % n]);
        s += (vp - v) * (vp - v) / (h * h) + (v - vm) * (v - vm) / (h * h);
    }
    return 0.5 * s * h;
}

} // namespace

TEST(Fisher, ConstantStateIsZero) {
    const Grid<double> g(16);
    EXPECT_EQ(discrete_fisher(DensityField<double>::constant(g, 1.0)), 0.0);
    EXPECT_EQ(discrete_fisher(DensityField<double>::constant(g, 3.5)), 0.0);
}

TEST(Fisher, AlternatingDensity) {
    const Grid<double> g(8);
    const DensityField<double> u(g, {1, 4, 1, 4, 1, 4, 1, 4});
    EXPECT_DOUBLE_EQ(discrete_fisher(u), 64.0);
}

TEST(Fisher, MatchesOracleOnRandomInput) {
    std::mt19937_64 gen(5);
    for (std::size_t n : {5u, 16u, 101u}) {
        const auto raw = positive(n, gen);
        const DensityField<double> u(Grid<double>(n), raw);
        EXPECT_NEAR(discrete_fisher(u), fisher_oracle(raw), 1e-12 * fisher_oracle(raw));
    }
}

TEST(VarDerivSingle, ConstantIsZero) {
    const auto d = var_deriv_single(SqrtField<double>::constant(Grid<double>(9), 2.5));
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(d[i], 0.0);
}

TEST(VarDerivSingle, FivePointBump) {
    const SqrtField<double> w(Grid<double>(5), {1, 2, 1, 1, 1});
    EXPECT_NEAR(var_deriv_single(w)[1], 25.0, 1e-12);
}

TEST(VarDerivSingle, ScaleInvariant) {
    std::mt19937_64 gen(11);
    const Grid<double> g(16);
    const auto raw = positive(16, gen);
    std::vector<double> scaled(raw);
    for (auto& x : scaled) x *= 7.25;
    const auto a = var_deriv_single(SqrtField<double>(g, raw));
    const auto b = var_deriv_single(SqrtField<double>(g, scaled));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(a[i], b[i], 1e-13 * std::max(1.0, std::abs(a[i])));
}

TEST(VarDerivSingle, RejectsNonPositive) {
    EXPECT_THROW(var_deriv_single(SqrtField<double>(Grid<double>(5), {1, 0, 1, 1, 1})), DomainError);
    EXPECT_THROW(var_deriv_single(SqrtField<double>(Grid<double>(5), {1, -1, 1, 1, 1})), DomainError);
}

TEST(VarDerivPair, SteadyStateIsZero) {
    const auto ones = DensityField<double>::constant(Grid<double>(8), 1.0);
    const auto d = var_deriv_pair(ones, ones);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(d[i], 0.0);
}

TEST(VarDerivPair, EqualsSingleAtMidpoint) {
    std::mt19937_64 gen(17);
    const Grid<double> g(16);
    const DensityField<double> u1(g, positive(16, gen)), u0(g, positive(16, gen));
    std::vector<double> mid(16);
    for (std::size_t i = 0; i < 16; ++i) mid[i] = 0.5 * (std::sqrt(u1[i]) + std::sqrt(u0[i]));
    const auto pair = var_deriv_pair(u1, u0);
    const auto single = var_deriv_single(SqrtField<double>(g, mid));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(pair[i], single[i], 1e-12 * std::max(1.0, std::abs(single[i])));
}

TEST(VarDerivPair, ChainRuleOnRandomPairs) {
    std::mt19937_64 gen(23);
    const Grid<double> g(16);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityField<double> u1(g, positive(16, gen)), u0(g, positive(16, gen));
        const auto d = var_deriv_pair(u1, u0);
        double rhs = 0;
        for (std::size_t i = 0; i < 16; ++i) rhs += d[i] * (u1[i] - u0[i]);
        rhs *= g.h();
        const double lhs = fisher_oracle(u1.vector()) - fisher_oracle(u0.vector());
        const double scale = std::max(fisher_oracle(u1.vector()), fisher_oracle(u0.vector()));
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
    }
}

TEST(VarDerivPair, VacuumIsRejected) {
    const Grid<double> g(5);
    const DensityField<double> z(g, {0, 1, 1, 1, 1});
    EXPECT_THROW(var_deriv_pair(z, z), DomainError);
}

TEST(Entropy, Values) {
    const Grid<double> g(10);
    EXPECT_EQ(discrete_entropy(DensityField<double>::constant(g, 1.0)), 0.0);
    EXPECT_DOUBLE_EQ(discrete_entropy(DensityField<double>::constant(g, 4.0)), 2.0);
}

TEST(Entropy, EqualsFourHellingerSquaredToOnes) {
    std::mt19937_64 gen(29);
    const Grid<double> g(32);
    const auto ones = DensityField<double>::constant(g, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityField<double> u(g, positive(32, gen, 0.0, 5.0));
        const double e = discrete_entropy(u);
        EXPECT_NEAR(e, 4 * discrete_hellinger_sq(u, ones), 1e-13 * e);
    }
}

TEST(Hellinger, Values) {
    const Grid<double> g(12);
    const auto ones = DensityField<double>::constant(g, 1.0);
    const auto fours = DensityField<double>::constant(g, 4.0);
    EXPECT_EQ(discrete_hellinger(ones, ones), 0.0);
    EXPECT_NEAR(discrete_hellinger(ones, fours), std::sqrt(0.5), 1e-15);
}

TEST(Hellinger, TriangleInequality) {
    std::mt19937_64 gen(31);
    const Grid<double> g(16);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityField<double> a(g, positive(16, gen, 0, 3)), b(g, positive(16, gen, 0, 3)),
            c(g, positive(16, gen, 0, 3));
        EXPECT_LE(discrete_hellinger(a, c), discrete_hellinger(a, b) + discrete_hellinger(b, c) + 1e-12);
    }
}

TEST(Mass, Values) {
    const Grid<double> g(13);
    EXPECT_DOUBLE_EQ(mass(DensityField<double>::constant(g, 1.0)), 1.0);
    EXPECT_DOUBLE_EQ(mass(DensityField<double>::constant(g, 2.0)), 2.0);
    const auto u = initial_condition(InitialCondition<double>{}, Grid<double>(200));
    EXPECT_NEAR(mass(u), 1.0, 1e-14);
}

TEST(StructureMetrics, CollectsAllQuantities) {
    const DensityField<double> u(Grid<double>(8), {1, 4, 1, 4, 1, 4, 1, 4});
    const auto m = structure_metrics(u);
    EXPECT_DOUBLE_EQ(m.mass, 2.5);
    EXPECT_DOUBLE_EQ(m.fisher, 64.0);
    EXPECT_DOUBLE_EQ(m.entropy, discrete_entropy(u));
    EXPECT_DOUBLE_EQ(m.hellinger_to_steady, std::sqrt(m.entropy / 4));
    EXPECT_EQ(m.min_value, 1.0);
}
