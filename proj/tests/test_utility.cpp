#include <gtest/gtest.h>

#include <cmath>

#include "mhb/error.hpp"
#include "mhb/utility.hpp"
#include "support/generators.hpp"

using namespace mhb;
using namespace mhb::testing;

namespace {

std::vector<UtilityModel> families() {
    return {UtilityModel::cara(1.0), UtilityModel::cara(2.5), UtilityModel::log(),
            UtilityModel::crra(0.5), UtilityModel::crra(2.0), UtilityModel::sqrt()};
}

// Points well inside the wage domain of every family above.
std::vector<double> sample_wages() { return {0.2, 0.5, 1.0, 1.7, 3.0, 6.0}; }

}  // namespace

TEST(Utility, Examples) {
    EXPECT_NEAR(UtilityModel::cara(1.0).value(3.0), -std::exp(-3.0), 1e-15);
    EXPECT_NEAR(UtilityModel::log().inverse(0.0), 1.0, 1e-15);
    EXPECT_NEAR(UtilityModel::cara(1.0).inverse_marginal(std::exp(-2.0)), 2.0, 1e-14);
}

TEST(Utility, InverseRoundTrips) {
    for (const auto& u : families()) {
        for (double w : sample_wages()) {
            EXPECT_NEAR(u.inverse(u.value(w)), w, 1e-12 * std::max(1.0, w)) << u.describe();
            EXPECT_NEAR(u.inverse_marginal(u.marginal(w)), w, 1e-10 * std::max(1.0, w)) << u.describe();
            EXPECT_NEAR(u.inverse_derivative(u.value(w)) * u.marginal(w), 1.0, 1e-12) << u.describe();
        }
    }
}

TEST(Utility, DerivativesMatchFiniteDifferences) {
    const double eps = 1e-5;
    for (const auto& u : families()) {
        for (double w : sample_wages()) {
            const double fd = (u.value(w + eps) - u.value(w - eps)) / (2 * eps);
            EXPECT_LE(std::abs(u.marginal(w) - fd), 1e-6 * std::max(1.0, std::abs(u.marginal(w))))
                << u.describe();
            const double fd2 = (u.marginal(w + eps) - u.marginal(w - eps)) / (2 * eps);
            EXPECT_LE(std::abs(u.curvature(w) - fd2), 1e-5 * std::max(1.0, std::abs(u.curvature(w))))
                << u.describe();
            const double v = u.value(w);
            // Keep the stencil away from a finite end of the utility range.
            if (!u.in_range(v - 0.05) || !u.in_range(v + 0.05)) continue;
            const double fdh = (u.inverse(v + eps) - u.inverse(v - eps)) / (2 * eps);
            EXPECT_LE(std::abs(u.inverse_derivative(v) - fdh),
                      1e-6 * std::max(1.0, std::abs(u.inverse_derivative(v))))
                << u.describe();
        }
    }
}

TEST(Utility, ConcaveAndInverseConvex) {
    Rng rng(5);
    for (const auto& u : families()) {
        for (int i = 0; i < 200; ++i) {
            const double a = uniform(rng, 0.1, 8.0), b = uniform(rng, 0.1, 8.0), t = uniform(rng, 0, 1);
            EXPECT_GE(u.value(t * a + (1 - t) * b), t * u.value(a) + (1 - t) * u.value(b) - 1e-12);
            const double va = u.value(a), vb = u.value(b);
            EXPECT_LE(u.inverse(0.5 * (va + vb)), 0.5 * (a + b) + 1e-12);
        }
    }
}

TEST(Utility, DomainErrors) {
    EXPECT_THROW(UtilityModel::log().value(-1.0), Error);
    EXPECT_THROW(UtilityModel::sqrt().value(-0.5), Error);
    EXPECT_THROW(UtilityModel::cara(1.0).inverse(0.5), Error);
    try {
        UtilityModel::cara(1.0).inverse(0.5);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
    EXPECT_THROW(UtilityModel::cara(-1.0), Error);
    EXPECT_THROW(UtilityModel::crra(1.0), Error);
}

TEST(Utility, RangesPerFamily) {
    EXPECT_TRUE(UtilityModel::cara(1.0).in_range(-0.1));
    EXPECT_FALSE(UtilityModel::cara(1.0).in_range(0.0));
    EXPECT_TRUE(UtilityModel::log().in_range(-50.0));
    EXPECT_FALSE(UtilityModel::sqrt().in_range(-0.1));
    EXPECT_FALSE(UtilityModel::crra(2.0).in_range(0.1));
}

TEST(Utility, DomainMayOnlyTighten) {
    const auto u = UtilityModel::log().with_domain(0.5, 10.0);
    EXPECT_TRUE(u.domain_restricted());
    EXPECT_THROW(u.value(0.25), Error);
    EXPECT_THROW(UtilityModel::log().with_domain(-1.0, 2.0), Error);
}

TEST(Utility, TabulatedInterpolatesMonotonically) {
    const auto u = UtilityModel::tabulated({1, 2, 3, 4}, {0.0, 0.69, 1.1, 1.39});
    EXPECT_NEAR(u.value(2.0), 0.69, 1e-15);
    for (double w = 1.0; w < 3.99; w += 0.05) {
        EXPECT_LT(u.value(w), u.value(w + 0.01));
        EXPECT_NEAR(u.inverse(u.value(w)), w, 1e-9);
    }
    EXPECT_THROW(UtilityModel::tabulated({1, 2, 3}, {0.0, 0.5, 0.4}), Error);
}
