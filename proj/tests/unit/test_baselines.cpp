#include <gtest/gtest.h>

#include <cmath>

#include "agp/baselines.hpp"
#include "oracles.hpp"

using agp::LogNormalUtility;
using agp::ZeroOrderState;

TEST(LogNormal, ValueAtOne) {
    EXPECT_NEAR(agp::lognormal_value(0.9, 1.0), 1.0 / 0.9, 1e-15);
}

TEST(LogNormal, GradientMatchesFiniteDifferences) {
    for (double xi : {0.6, 0.7, 0.9}) {
        for (int i = 0; i <= 95; ++i) {
            const double d = 0.05 + i * 0.01;
            const double h = 1e-6;
            const double fd = (agp::lognormal_value(xi, d + h) - agp::lognormal_value(xi, d - h)) / (2 * h);
            EXPECT_NEAR(agp::lognormal_grad(xi, d), fd, 1e-6 * std::max(1.0, std::abs(fd))) << xi << " " << d;
        }
    }
}

TEST(LogNormal, ArgmaxIsInteriorAndMatchesLineSearch) {
    for (double xi : {0.6, 0.7, 0.9}) {
        const LogNormalUtility u(xi);
        const auto [x, v] = oracle::line_search_max([&](double d) { return agp::lognormal_value(xi, d); }, 1e-3, 1.0, 1e-5);
        EXPECT_GT(x, 0.01);
        EXPECT_LT(x, 0.99);
        EXPECT_NEAR(u.argmax(), x, 1e-5);
        EXPECT_NEAR(u.max_value(), v, 1e-8);
    }
    // Fixture: ξ = 0.9 peaks at exp(-0.405).
    EXPECT_NEAR(LogNormalUtility(0.9).argmax(), 0.66697681085847438, 1e-15);
}

TEST(LogNormal, ClampAndErrors) {
    EXPECT_EQ(agp::lognormal_value(0.9, 0.0), agp::lognormal_value(0.9, agp::kMinDistance));
    EXPECT_EQ(agp::lognormal_grad(0.9, -1.0), 0.0);
    EXPECT_THROW(agp::lognormal_value(0.0, 0.5), agp::InputError);
    EXPECT_THROW(agp::lognormal_value(0.9, std::nan("")), agp::InputError);
    EXPECT_THROW((agp::SyntheticUserModel{{0.9, -1.0}}).validate(), agp::InputError);
}

TEST(ZeroOrder, TwoPointExactOnAffine) {
    ZeroOrderState s(1, 2);
    EXPECT_EQ(agp::zero_order_grad(s, 0), 0.0);  // not full
    s.push(0, 0.3, 0.6);
    s.push(0, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(agp::zero_order_grad(s, 0), 2.0);
    s.push(0, 0.2, 0.4);  // evicts the oldest
    EXPECT_EQ(s.buffer(0).size(), 2u);
    EXPECT_DOUBLE_EQ(agp::zero_order_grad(s, 0), 2.0);
}

TEST(ZeroOrder, FourPointExactOnAffine) {
    ZeroOrderState s(2, 4);
    for (double d : {0.1, 0.4, 0.35, 0.8}) {
        s.push(0, d, 2.0 * d - 1.0);
        s.push(1, d, -3.0 * d);
    }
    EXPECT_NEAR(agp::zero_order_grad(s, 0), 2.0, 1e-14);
    EXPECT_NEAR(agp::zero_order_grad(s, 1), -3.0, 1e-14);
}

TEST(ZeroOrder, GuardSuppressesDegenerateQuotients) {
    ZeroOrderState two(1, 2), four(1, 4);
    for (int i = 0; i < 4; ++i) {
        two.push(0, 0.5, i * 1.0);
        four.push(0, 0.5 + i * 1e-5, i * 1.0);
    }
    EXPECT_EQ(agp::zero_order_grad(two, 0), 0.0);
    EXPECT_EQ(agp::zero_order_grad(four, 0), 0.0);
    EXPECT_THROW(ZeroOrderState(1, 3), agp::InputError);
}

TEST(ZeroOrder, TaylorErrorOnSmoothUtility) {
    const double xi = 0.7, h = 1e-2;
    for (double d : {0.2, 0.4, 0.6, 0.8}) {
        ZeroOrderState s(1, 2);
        s.push(0, d - h, agp::lognormal_value(xi, d - h));
        s.push(0, d, agp::lognormal_value(xi, d));
        EXPECT_NEAR(agp::zero_order_grad(s, 0), agp::lognormal_grad(xi, d), 0.1) << d;
    }
}
