#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dlss/scheme.hpp"

using namespace dlss;

namespace {

std::vector<double> positive(std::size_t n, std::mt19937_64& gen, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

} // namespace

TEST(SchemeParams, Validation) {
    const Grid<double> g(8);
    EXPECT_THROW(SchemeParams<double>(g, 1.0, 1.0), DomainError);
    EXPECT_THROW(SchemeParams<double>(g, 1.5, 1.0), DomainError);
    EXPECT_THROW(SchemeParams<double>(g, 0.0, 1.0), DomainError);
    EXPECT_THROW(SchemeParams<double>(g, 1e-6, -1.0), DomainError);
    EXPECT_THROW(SchemeParams<double>(g, std::nan(""), 1.0), DomainError);
    EXPECT_NO_THROW(SchemeParams<double>(g, 1e-6, 0.0));
}

TEST(SchemeParams, Coefficients) {
    const SchemeParams<double> p(Grid<double>(200), 1e-6, 2.0);
    EXPECT_DOUBLE_EQ(p.quartic_coeff(), 1e-6 / (4 * std::pow(5e-3, 4)));
    EXPECT_DOUBLE_EQ(p.dispersive_coeff(), 1e-6 * 2.0 / (8 * std::pow(5e-3, 3)));
}

TEST(OpAd, ConstantIsZero) {
    const auto a = op_Ad(SqrtField<double>::constant(Grid<double>(10), 1.7));
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(a[i], 0.0, 1e-12);
}

TEST(OpAd, MonotonicityIdentity) {
    std::mt19937_64 gen(7);
    const Grid<double> g(16);
    for (int trial = 0; trial < 100; ++trial) {
        const SqrtField<double> w(g, positive(16, gen)), big_w(g, positive(16, gen));
        const auto aw = op_Ad(w), abw = op_Ad(big_w);
        const auto fw = var_deriv_single(w), fbw = var_deriv_single(big_w);
        double lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            lhs += (aw[i] - abw[i]) * (w[i] - big_w[i]);
            rhs += w[i] * big_w[i] * (fw[i] - fbw[i]) * (fw[i] - fbw[i]);
        }
        EXPECT_GE(rhs, 0.0);
        EXPECT_NEAR(lhs, rhs, 1e-11 * rhs);
    }
}

TEST(OpAd, WeightedSumTelescopes) {
    const Grid<double> g(64);
    std::vector<double> raw(64);
    for (std::size_t i = 0; i < 64; ++i) raw[i] = 1 + 0.1 * std::sin(2 * std::numbers::pi * g.node(i));
    const SqrtField<double> w(g, raw);
    const auto a = op_Ad(w);
    double s = 0, scale = 0;
    for (std::size_t i = 0; i < 64; ++i) {
        s += w[i] * a[i];
        scale += std::abs(w[i] * a[i]);
    }
    EXPECT_LE(std::abs(s), 1e-12 * scale);
}

TEST(OpAd, RejectsNonPositive) {
    EXPECT_THROW(op_Ad(SqrtField<double>(Grid<double>(5), {1, 1, 0, 1, 1})), DomainError);
}

TEST(Residual, SteadyStateIsZero) {
    const Grid<double> g(32);
    const SchemeParams<double> p(g, 1e-6, 10.0);
    const auto ones = SqrtField<double>::constant(g, 1.0);
    const auto rs = residual_structural(ones, ones, p);
    const auto re = residual_expanded(ones, ones, p);
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_NEAR(rs[i], 0.0, 1e-12);
        EXPECT_EQ(re[i], 0.0);
    }
}

TEST(Residual, ConstantsGiveTheirDifference) {
    const Grid<double> g(12);
    const SchemeParams<double> p(g, 1e-4, 3.0);
    const auto w = SqrtField<double>::constant(g, 1.25);
    const auto v = SqrtField<double>::constant(g, 0.75);
    const auto re = residual_expanded(w, v, p);
    const auto rs = residual_structural(w, v, p);
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_DOUBLE_EQ(re[i], 0.5);
        EXPECT_NEAR(rs[i], 0.5, 1e-12);
    }
}

TEST(Residual, FourthOrderBracketOnAlternatingState) {
    // With V_prev = W the residual reduces to a * bracket - b * dispersive;
    // the dispersive stencil vanishes on a period-2 state.
    const Grid<double> g(8);
    const SchemeParams<double> p(g, 1e-3, 5.0);
    const SqrtField<double> w(g, {2, 1, 2, 1, 2, 1, 2, 1});
    const auto r = residual_expanded(w, w, p);
    EXPECT_NEAR(r[0] / p.quartic_coeff(), 6.0, 1e-12);
    EXPECT_NEAR(r[1] / p.quartic_coeff(), 1 + 2 + 1 - 16.0 / 1, 1e-12);
}

TEST(Residual, StructuralEqualsExpanded) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> logtau(-8, -2), delta(0, 100);
    const Grid<double> g(16);
    for (int trial = 0; trial < 1000; ++trial) {
        const SchemeParams<double> p(g, std::pow(10.0, logtau(gen)), delta(gen));
        const SqrtField<double> w(g, positive(16, gen)), v(g, positive(16, gen));
        const auto rs = residual_structural(w, v, p);
        const auto re = residual_expanded(w, v, p);
        double diff = 0, scale = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            diff = std::max(diff, std::abs(rs[i] - re[i]));
            scale = std::max(scale, std::abs(rs[i]));
        }
        ASSERT_LE(diff, 1e-11 * scale) << "trial " << trial;
    }
}

TEST(Residual, GridMismatchAndFloor) {
    const Grid<double> g(8), other(9);
    const SchemeParams<double> p(g, 1e-6, 1.0);
    const auto ones = SqrtField<double>::constant(g, 1.0);
    EXPECT_THROW(residual_expanded(SqrtField<double>::constant(other, 1.0),
                                   SqrtField<double>::constant(other, 1.0), p),
                 DomainError);
    EXPECT_THROW(residual_expanded(ones, SqrtField<double>::constant(other, 1.0), p), DomainError);
    SqrtField<double> low = ones;
    low[3] = 1e-13;
    EXPECT_THROW(residual_expanded(low, ones, p), DomainError);
    EXPECT_THROW(jacobian_expanded(low, p), DomainError);
}

TEST(Jacobian, SteadyStateWithoutDispersion) {
    const Grid<double> g(200);
    const SchemeParams<double> p(g, 1e-6, 0.0);
    const auto jac = jacobian_expanded(SqrtField<double>::constant(g, 1.0), p);
    const double a = 1e-6 / (4 * std::pow(5e-3, 4));
    for (std::size_t i = 0; i < 200; ++i) {
        EXPECT_DOUBLE_EQ(jac.at(i, -2), a);
        EXPECT_DOUBLE_EQ(jac.at(i, 2), a);
        EXPECT_DOUBLE_EQ(jac.at(i, -1), -4 * a);
        EXPECT_DOUBLE_EQ(jac.at(i, 1), -4 * a);
        EXPECT_DOUBLE_EQ(jac.at(i, 0), 1 + 6 * a);
    }
}

TEST(Jacobian, DispersivePartIsStateIndependent) {
    std::mt19937_64 gen(19);
    const Grid<double> g(16);
    const SchemeParams<double> with(g, 1e-5, 7.0), without(g, 1e-5, 0.0);
    const double b = 1e-5 * 7.0 / (8 * std::pow(g.h(), 3));
    for (int trial = 0; trial < 5; ++trial) {
        const SqrtField<double> w(g, positive(16, gen));
        const auto j1 = jacobian_expanded(w, with), j0 = jacobian_expanded(w, without);
        for (std::size_t i = 0; i < 16; ++i) {
            const double tol = 1e-12 * j0.max_abs();
            EXPECT_NEAR(j1.at(i, -2) - j0.at(i, -2), b, tol);
            EXPECT_NEAR(j1.at(i, 2) - j0.at(i, 2), -b, tol);
            EXPECT_NEAR(j1.at(i, -1) - j0.at(i, -1), -2 * b, tol);
            EXPECT_NEAR(j1.at(i, 1) - j0.at(i, 1), 2 * b, tol);
            EXPECT_NEAR(j1.at(i, 0) - j0.at(i, 0), 0.0, tol);
        }
    }
}

TEST(Jacobian, MatchesCentralDifferences) {
    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> logtau(-8, -3), delta(0, 100);
    const Grid<double> g(16);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const SchemeParams<double> p(g, std::pow(10.0, logtau(gen)), delta(gen));
        const SqrtField<double> w(g, positive(16, gen, 0.5, 2.0)), v(g, positive(16, gen));
        const auto jac = to_dense(jacobian_expanded(w, p));
        for (std::size_t j = 0; j < 16; ++j) {
            const double eps = 1e-5 * w[j];
            SqrtField<double> wp = w, wm = w;
            wp[j] += eps;
            wm[j] -= eps;
            const auto rp = residual_expanded(wp, v, p), rm = residual_expanded(wm, v, p);
            for (std::size_t i = 0; i < 16; ++i) {
                const double fd = (rp[i] - rm[i]) / (2 * eps);
                worst = std::max(worst, std::abs(fd - jac(i, j)) / std::max(1.0, std::abs(jac(i, j))));
            }
        }
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(SchemeRhs, MassNeutral) {
    std::mt19937_64 gen(41);
    for (std::size_t n : {8u, 16u, 64u}) {
        const Grid<double> g(n);
        const SqrtField<double> w(g, positive(n, gen));
        const auto rhs = scheme_rhs(w, 12.5);
        double s = 0, scale = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s += 2 * w[i] * rhs[i];
            scale += std::abs(2 * w[i] * rhs[i]);
        }
        EXPECT_LE(std::abs(s), 1e-11 * scale);
    }
}

TEST(SchemeRhs, FourthOrderPartIsMinusHalfAd) {
    std::mt19937_64 gen(43);
    const Grid<double> g(16);
    const SqrtField<double> w(g, positive(16, gen));
    const auto rhs = scheme_rhs(w, 0.0);
    const auto a = op_Ad(w);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(rhs[i], -0.5 * a[i], 1e-12 * std::max(1.0, std::abs(a[i])));
}
