#include <gtest/gtest.h>

#include "dlss/checks.hpp"

using namespace dlss;

TEST(Checks, AllSuitesPass) {
    const auto results = checks::run_all(7, 50);
    ASSERT_EQ(results.size(), 7u);
    for (const auto& r : results) {
        EXPECT_TRUE(r.passed) << r.name << " worst " << r.worst;
        EXPECT_EQ(r.trials, 50);
        EXPECT_LE(r.worst, r.threshold);
    }
}

TEST(Checks, DeterministicForFixedSeed) {
    const auto a = checks::run_all(42, 20);
    const auto b = checks::run_all(42, 20);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].worst, b[i].worst);
}

TEST(Checks, SamplerIsReproducibleAndInRange) {
    checks::Sampler s1(3), s2(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = s1.uniform(0.1, 2.0);
        EXPECT_EQ(x, s2.uniform(0.1, 2.0));
        EXPECT_GE(x, 0.1);
        EXPECT_LT(x, 2.0);
    }
}

TEST(Checks, ZeroTrialsRejected) {
    EXPECT_THROW(checks::run_all(1, 0), DomainError);
}
