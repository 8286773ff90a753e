#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "agp/baselines.hpp"
#include "agp/regret.hpp"
#include "oracles.hpp"

using agp::BoxDomain;
using agp::BoundInputs;
using agp::KernelSpec;
using agp::TimeVaryingQuadratic;
using agp::Vector;

namespace {

agp::UserModel lognormal_users(double xi0, double xi1) {
    return agp::UserModel::separable({std::make_shared<agp::LogNormalUtility>(xi0),
                                      std::make_shared<agp::LogNormalUtility>(xi1)},
                                     0.1, agp::FeedbackSchedule::every_step());
}

TimeVaryingQuadratic default_quadratic(double omega) {
    return TimeVaryingQuadratic(TimeVaryingQuadratic::default_q(2), agp::TargetTrajectory(2, omega));
}

/// Bound formula written out from its definition.
double bound_reference(const BoundInputs& in) {
    const double pi = 3.14159265358979323846;
    const double n = static_cast<double>(in.T), d = static_cast<double>(in.d);
    const double beta = 2.0 * std::log(2.0 * n * n * pi * pi / (3.0 * in.delta)) +
                        2.0 * d * std::log(d * n * n * in.b * in.r * std::sqrt(std::log(4.0 * d * in.a / in.delta)));
    const double c1 = 8.0 / std::log(1.0 + 1.0 / in.sigma);
    const double lg = std::log(2.0 * d * in.a / in.delta);
    const double c2 = 2.0 * in.D_g / (in.b * std::sqrt(lg)) + in.L / (d * in.b * in.b * lg) + 2.0;
    double geo = 0.0;  // Σ_{j<q} η^j
    for (std::size_t j = 0; j < in.q; ++j) geo += std::pow(in.eta, double(j));
    const double ep = std::pow(in.eta, double(in.p));
    return std::sqrt(c1 * n * beta * in.gamma_T) + c2 + 2.0 * in.Delta * geo * ep * n / (1.0 - ep);
}

}  // namespace

TEST(Ledger, SumsInStepOrder) {
    agp::RegretLedger ledger;
    EXPECT_EQ(ledger.total(), 0.0);
    ledger.add(1.0, 0.5);
    ledger.add(2.0, 2.0);
    ledger.add(0.0, -0.25);
    ASSERT_EQ(ledger.size(), 3u);
    EXPECT_DOUBLE_EQ(ledger.instantaneous(0), 0.5);
    EXPECT_DOUBLE_EQ(ledger.instantaneous(1), 0.0);
    EXPECT_DOUBLE_EQ(ledger.cumulative(2), 0.75);
    EXPECT_DOUBLE_EQ(ledger.average(2), 0.25);
    EXPECT_DOUBLE_EQ(ledger.f_x(2), -0.25);
}

TEST(OracleOpt, WithoutUsersFindsTarget) {
    const auto v = default_quadratic(0.4);
    const auto dom = BoxDomain::unit(2);
    for (std::size_t k : {1u, 7u, 23u}) {
        const agp::Tick tick{k, 0.1 * k};
        const agp::SmoothFunction f{[&](const Vector& x) { return v.value(agp::as_point(x), tick); },
                                    [&](const Vector& x) { return v.grad(agp::as_point(x), tick); }};
        const auto best = agp::oracle_opt(f, dom, 51, 100);
        EXPECT_LE((best.x - v.target().at(tick)).norm(), 1e-6) << k;
        EXPECT_NEAR(best.value, 0.0, 1e-10);
    }
}

TEST(SeparableOracle, MatchesBruteForceGrid) {
    const auto v = default_quadratic(0.4);
    const auto users = lognormal_users(0.6, 0.7);
    const auto dom = BoxDomain::unit(2);
    const agp::SeparableOracle fine(v, users, 1.0, dom, 501, 50);
    const agp::SeparableOracle coarse(v, users, 1.0, dom, 101, 50);
    // Exhaustive 2001² lattice with the users tabulated per axis.
    const int n = 2000;
    std::vector<double> u0(n + 1), u1(n + 1);
    for (int i = 0; i <= n; ++i) {
        u0[i] = agp::lognormal_value(0.6, double(i) / n);
        u1[i] = agp::lognormal_value(0.7, double(i) / n);
    }
    const agp::Matrix Q = v.gamma() * v.q();
    for (std::size_t k : {1u, 12u, 40u, 77u}) {
        const agp::Tick tick{k, 0.1 * k};
        const Vector c = v.target().at(tick);
        double brute = -INFINITY;
        for (int i = 0; i <= n; ++i) {
            const double a = double(i) / n - c[0];
            for (int j = 0; j <= n; ++j) {
                const double b = double(j) / n - c[1];
                const double val = -0.5 * (Q(0, 0) * a * a + 2.0 * Q(0, 1) * a * b + Q(1, 1) * b * b) + u0[i] + u1[j];
                brute = std::max(brute, val);
            }
        }
        const auto r = fine.at(tick);
        EXPECT_GE(r.value, brute - 1e-9) << k;
        EXPECT_NEAR(r.value, brute, 1e-4) << k;
        EXPECT_NEAR(coarse.at(tick).value, r.value, 1e-4) << k;
        const double direct = v.value(agp::as_point(r.x), tick) + users.total(r.x);
        EXPECT_NEAR(r.value, direct, 1e-12);
        EXPECT_TRUE(dom.contains(agp::as_point(r.x)));
    }
}

TEST(SeparableOracle, DominatesRandomDecisions) {
    const auto v = default_quadratic(0.2);
    const auto users = lognormal_users(0.6, 0.7);
    const auto dom = BoxDomain::unit(2);
    const agp::SeparableOracle oracle(v, users, 1.0, dom);
    const auto f = agp::true_objective(v, users, 1.0, {5, 0.5});
    const double best = oracle.at({5, 0.5}).value;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 2000; ++i) EXPECT_LE(f.value(oracle::uniform_point(rng, 2)), best + 1e-12);
}

TEST(InfoGain, FirstStepAndDiminishingIncrements) {
    const auto g = agp::info_gain_greedy(KernelSpec(0.1), BoxDomain::unit(1), 0.01, 60, 0.1);
    ASSERT_EQ(g.size(), 60u);
    EXPECT_NEAR(g[0], 0.5 * std::log(101.0), 1e-12);
    for (std::size_t t = 1; t < g.size(); ++t) {
        EXPECT_GT(g[t], g[t - 1]);
        if (t >= 2) EXPECT_LE(g[t] - g[t - 1], g[t - 1] - g[t - 2] + 1e-12) << t;
    }
}

TEST(InfoGain, MatchesDenseGreedyReference) {
    const double ell = 0.3, noise = 0.1;
    const std::size_t T = 8;
    const auto g = agp::info_gain_greedy(KernelSpec(ell), BoxDomain::unit(1), 0.05, T, noise);
    std::vector<oracle::Vec> X;
    std::vector<double> y;
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        double best_var = -1.0;
        oracle::Vec best_x(1);
        for (int i = 0; i <= 20; ++i) {
            oracle::Vec x(1);
            x << i * 0.05;
            const double var = oracle::dense_posterior(X, y, ell, 1.0, noise * noise, x).variance;
            if (var > best_var + 1e-12) best_var = var, best_x = x;
        }
        total += 0.5 * std::log(1.0 + best_var / (noise * noise));
        X.push_back(best_x);
        y.push_back(0.0);
        EXPECT_NEAR(g[t], total, 1e-9) << t;
    }
}

TEST(InfoGain, DistinctModeRejectsLongHorizons) {
    EXPECT_THROW(agp::info_gain_greedy(KernelSpec(), BoxDomain::unit(1), 0.1, 12, 0.1, true), agp::InputError);
    EXPECT_NO_THROW(agp::info_gain_greedy(KernelSpec(), BoxDomain::unit(1), 0.1, 11, 0.1, true));
    // A multiset keeps gaining past the lattice size.
    const auto g = agp::info_gain_greedy(KernelSpec(), BoxDomain::unit(1), 0.1, 30, 0.1);
    EXPECT_GT(g[29], g[10]);
}

TEST(Bound, ConstantsAndReference) {
    BoundInputs in;
    in.T = 500;
    in.gamma_T = 12.0;
    in.Delta = 0.01;
    in.eta = 0.95;
    in.L = 1.25;
    in.D_g = 1.3;
    const auto t = agp::theoretical_bound(in);
    EXPECT_NEAR(t.C1, 3.3363, 1e-4);
    EXPECT_NEAR(t.total, bound_reference(in), 1e-9 * bound_reference(in));
    EXPECT_NEAR(t.total, t.learning + t.C2 + t.G_T, 1e-12);
    in.p = 2;
    in.q = 5;
    EXPECT_NEAR(agp::theoretical_bound(in).total, bound_reference(in), 1e-9 * bound_reference(in));
}

TEST(Bound, StaticDriftHasNoTrackingTerm) {
    BoundInputs in;
    in.T = 1000;
    in.gamma_T = 20.0;
    in.Delta = 0.0;
    EXPECT_EQ(agp::theoretical_bound(in).G_T, 0.0);
}

TEST(Bound, MonotoneInHorizonDriftAndContraction) {
    BoundInputs in;
    in.gamma_T = 10.0;
    in.Delta = 0.02;
    double prev = 0.0;
    for (std::size_t T : {10u, 100u, 1000u, 10000u}) {
        in.T = T;
        const double b = agp::theoretical_bound(in).total;
        EXPECT_GT(b, prev);
        prev = b;
    }
    BoundInputs more = in;
    more.Delta = 0.05;
    EXPECT_GT(agp::theoretical_bound(more).total, agp::theoretical_bound(in).total);
    more = in;
    more.eta = 0.99;
    EXPECT_GT(agp::theoretical_bound(more).total, agp::theoretical_bound(in).total);
}

TEST(Bound, RejectsNonContractingSolver) {
    BoundInputs in;
    in.eta = 1.0;
    EXPECT_THROW(agp::theoretical_bound(in), agp::InputError);
    in.eta = 0.5;
    in.p = 3;
    in.q = 2;
    EXPECT_THROW(agp::theoretical_bound(in), agp::InputError);
}

TEST(LearningRate, ZeroForSameBeliefAndPositiveAfterData) {
    agp::GpPosterior prev(KernelSpec(0.6), 0.01, 1);
    std::vector<Vector> probes;
    for (int i = 0; i <= 50; ++i) probes.push_back(Vector::Constant(1, i / 50.0));
    EXPECT_EQ(agp::learning_rate_error(prev, 4.0, prev, 4.0, probes), 0.0);
    auto curr = prev.updated({Vector::Constant(1, 0.3), 0.7});
    const double e = agp::learning_rate_error(prev, 4.0, curr, 4.2, probes);
    double ref = 0.0;
    for (const auto& p : probes) {
        ref = std::max(ref, std::abs(curr.mean(agp::as_point(p)) + std::sqrt(4.2) * curr.stddev(agp::as_point(p)) -
                                     prev.mean(agp::as_point(p)) - 2.0 * prev.stddev(agp::as_point(p))));
    }
    EXPECT_NEAR(e, ref, 1e-14);
    EXPECT_GT(e, 0.0);
}

TEST(ProbeTracker, FollowsIncrementalPosterior) {
    std::vector<Vector> probes;
    for (int i = 0; i <= 40; ++i) probes.push_back(Vector::Constant(1, i / 40.0));
    agp::ProbeTracker tracker(probes);
    agp::GpPosterior post(KernelSpec(0.1), 0.01, 1);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal;
    for (int n = 0; n < 120; ++n) {
        if (n % 3 != 2) {  // skip some syncs so several rows arrive at once
            tracker.sync(post);
            for (std::size_t i = 0; i < probes.size(); ++i) {
                ASSERT_NEAR(tracker.mean()[i], post.mean(agp::as_point(probes[i])), 1e-10) << n;
                ASSERT_NEAR(tracker.variance()[i], post.variance(agp::as_point(probes[i])), 1e-10) << n;
            }
        }
        post.update(agp::as_point(oracle::uniform_point(rng, 1)), normal(rng));
    }
    const auto u = tracker.ucb(9.0);
    tracker.sync(post);
    EXPECT_NEAR(tracker.ucb(9.0)[7], agp::ucb_value(post, 9.0, agp::as_point(probes[7])), 1e-10);
    (void)u;
}

TEST(SeparableError, ProductLatticeMaximum) {
    // Brute force over every combination of one probe per block.
    const std::vector<std::vector<double>> deltas{{0.1, -0.3, 0.2}, {-0.05, 0.4}, {0.0, -0.2, 0.1, 0.05}};
    double ref = 0.0;
    for (double a : deltas[0])
        for (double b : deltas[1])
            for (double c : deltas[2]) ref = std::max(ref, std::abs(a + b + c));
    EXPECT_DOUBLE_EQ(agp::combine_separable_error(deltas), ref);
    EXPECT_THROW(agp::combine_separable_error({{}}), agp::InputError);
}

TEST(UcMetric, OneAtArgmaxAndBounded) {
    const auto users = lognormal_users(0.6, 0.7);
    const auto dom = BoxDomain::unit(2);
    Vector best(2);
    best << agp::LogNormalUtility(0.6).argmax(), agp::LogNormalUtility(0.7).argmax();
    const auto uc = agp::uc_metric(users, best, dom);
    EXPECT_NEAR(uc[0], 1.0, 1e-9);
    EXPECT_NEAR(uc[1], 1.0, 1e-9);
    std::mt19937_64 rng(7);
    const agp::UcNormalizer norm(users, dom);
    for (int i = 0; i < 500; ++i) {
        for (double v : norm.uc(oracle::uniform_point(rng, 2))) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0 + 1e-12);
        }
    }
}

TEST(UcMetric, NonPositiveMaximumIsDegenerate) {
    struct Negative final : agp::UtilityFunction {
        std::size_t dim() const override { return 1; }
        double value(agp::Point) const override { return -1.0; }
        Vector grad(agp::Point) const override { return Vector::Zero(1); }
    };
    const auto users = agp::UserModel::separable({std::make_shared<Negative>()}, 0.1, agp::FeedbackSchedule::every_step());
    EXPECT_THROW(agp::uc_metric(users, Vector::Constant(1, 0.5), BoxDomain::unit(1)), agp::DegenerateInstance);
}

TEST(Series, RollingMeanAndReferenceRate) {
    const auto m = agp::rolling_mean({1, 2, 3, 4, 5}, 2);
    EXPECT_EQ(m, (std::vector<double>{1.0, 1.5, 2.5, 3.5, 4.5}));
    EXPECT_THROW(agp::rolling_mean({1.0}, 0), agp::InputError);
    const auto r = agp::reference_rate({100, 400, 1600}, 100, 0.5);
    EXPECT_DOUBLE_EQ(r[0], 0.5);
    EXPECT_NEAR(r[1], 0.5 * (std::log(400.0) / 20.0) / (std::log(100.0) / 10.0), 1e-15);
    EXPECT_LT(r[2], r[1]);
    EXPECT_THROW(agp::reference_rate({1}, 100, 0.5), agp::InputError);
}
