// Runs every primary acceptance criterion and prints one PASS/FAIL line per criterion.
// The process exits non-zero when any criterion fails. The expensive 25-run scenarios are
// simulated once each and shared between the criteria that read them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "agp/baselines.hpp"
#include "agp/experiment.hpp"
#include "agp/loop.hpp"
#include "agp/regret.hpp"
#include "agp/solver.hpp"
#include "agp/ucb.hpp"
#include "oracles.hpp"

namespace {

using agp::Vector;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
    std::printf("%s  %2d  %-22s %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// One 25-run scenario, simulated on first use.
struct Scenario {
    explicit Scenario(agp::ExperimentConfig c) : cfg(std::move(c)) {}

    agp::ExperimentConfig cfg;
    agp::ExperimentResult result;
    double runtime = 0.0;
    bool done = false;

    const agp::ExperimentResult& get() {
        if (!done) {
            const auto t0 = Clock::now();
            result = agp::run_experiment(cfg);
            runtime = seconds_since(t0);
            done = true;
        }
        return result;
    }
    /// Mean average regret at tick k (1-based).
    double avg(std::size_t k) { return get().aggregate.regret_avg.at(k - 1); }
};

agp::ExperimentConfig scenario_config(double omega) {
    agp::ExperimentConfig cfg;
    cfg.T = 2000;
    cfg.runs = 25;
    cfg.seed = 1;
    cfg.omega = omega;
    return cfg;
}

/// Mean over the last quarter of ticks of |UC_1 - UC_2| and of the user-averaged UC.
std::pair<double, double> steady_uc(const agp::Aggregate& a) {
    const std::size_t T = a.k.size(), from = T - T / 4;
    double gap = 0.0, level = 0.0;
    for (std::size_t i = from; i < T; ++i) {
        gap += std::abs(a.uc[0][i] - a.uc[1][i]);
        level += 0.5 * (a.uc[0][i] + a.uc[1][i]);
    }
    const double n = static_cast<double>(T - from);
    return {gap / n, level / n};
}

// 1
Verdict gp_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> size(1, 50);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 1 + trial % 2;
        const double ell = trial % 4 < 2 ? 1.0 : 0.4;
        const std::size_t n = size(rng);
        agp::GpPosterior post(agp::KernelSpec(ell), 0.01, static_cast<std::size_t>(d));
        std::vector<oracle::Vec> X;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) {
            X.push_back(oracle::uniform_point(rng, d));
            y.push_back(normal(rng));
            post.update(agp::as_point(X.back()), y.back());
        }
        for (int q = 0; q < 10; ++q) {
            const auto x = oracle::uniform_point(rng, d);
            const auto ref = oracle::dense_posterior(X, y, ell, 1.0, 0.01, x);
            worst = std::max(worst, oracle::rel_err(post.mean(agp::as_point(x)), ref.mean, 1e-6));
            worst = std::max(worst, oracle::rel_err(post.variance(agp::as_point(x)), ref.variance, 1e-6));
        }
    }
    const double rt = seconds_since(t0);
    return {worst <= 1e-8 && rt < 10.0, fmt("max rel err %.2e (limit 1e-8), %.2fs", worst, rt)};
}

// 2
Verdict gradients() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    std::normal_distribution<double> normal;
    double worst[5] = {};
    const agp::KernelSpec kernel(0.6);
    const agp::SyntheticUserModel synthetic{{0.9, 0.9}};
    for (int probe = 0; probe < 100; ++probe) {
        const Eigen::Index d = 1 + probe % 2;
        agp::GpPosterior post(kernel, 0.01, static_cast<std::size_t>(d));
        for (int i = 0; i < 1 + probe % 15; ++i) post.update(agp::as_point(oracle::uniform_point(rng, d)), normal(rng));
        const auto x = oracle::uniform_point(rng, d, 0.05, 0.95);
        const auto xp = agp::as_point(x);
        const auto check_at = [&](int slot, const std::function<double(const Vector&)>& f, const Vector& g,
                                  const Vector& at) {
            worst[slot] = std::max(worst[slot], oracle::rel_err(g, oracle::fd_gradient(f, at), 1e-6));
        };
        const auto check = [&](int slot, const std::function<double(const Vector&)>& f, const Vector& g) {
            check_at(slot, f, g, x);
        };
        check(0, [&](const Vector& p) { return post.mean(agp::as_point(p)); }, post.mean_grad(xp));
        check(1, [&](const Vector& p) { return post.stddev(agp::as_point(p)); }, post.stddev_grad(xp));
        const double beta = agp::beta(static_cast<std::size_t>(probe + 1), agp::ConfidenceParams{});
        check(2, [&](const Vector& p) { return agp::ucb_value(post, beta, agp::as_point(p)); },
              agp::ucb_grad(post, beta, xp));
        const auto other = oracle::uniform_point(rng, d);
        check(3, [&](const Vector& p) { return kernel.eval(agp::as_point(p), agp::as_point(other)); },
              kernel.grad_x(x, other));
        const Vector d1 = x.head(1);
        check_at(4, [&](const Vector& p) { return synthetic.value(0, p[0]); },
                 Vector::Constant(1, synthetic.grad(0, d1[0])), d1);
    }
    const double rt = seconds_since(t0);
    const double w = *std::max_element(std::begin(worst), std::end(worst));
    return {w <= 1e-5 && rt < 10.0,
            fmt("max rel err mean %.1e std %.1e ucb %.1e kernel %.1e synthetic %.1e (limit 1e-5), %.2fs", worst[0],
                worst[1], worst[2], worst[3], worst[4], rt)};
}

// 3
Verdict solver_contraction() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(303);
    const auto dom = agp::BoxDomain::unit(2);
    double worst_slack = -INFINITY;
    int steps_checked = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const agp::Matrix B = agp::Matrix::Random(2, 2);
        const agp::Matrix A = B * B.transpose() + 0.2 * agp::Matrix::Identity(2, 2);
        const Vector c = oracle::uniform_point(rng, 2, -0.5, 1.5);
        const agp::SmoothFunction phi{[A, c](const Vector& x) { return -0.5 * (x - c).dot(A * (x - c)); },
                                      [A, c](const Vector& x) -> Vector { return -A * (x - c); }};
        const double theta = agp::estimate_smoothness(phi.grad, dom, 5);
        const double alpha = 1.0 / theta;
        const auto est = agp::estimate_pl_kappa(phi, dom, theta, 2000, 7 + static_cast<std::uint64_t>(inst));
        Vector x = oracle::uniform_point(rng, 2);
        for (int k = 0; k < 30; ++k) {
            const double gap = est.phi_star - phi.value(x);
            if (gap < 1e-9) break;
            x = agp::pgd_step(phi.grad, x, alpha, dom);
            const double ratio = (est.phi_star - phi.value(x)) / gap;
            worst_slack = std::max(worst_slack, ratio - (1.0 - alpha * est.kappa));
            ++steps_checked;
        }
    }
    const double rt = seconds_since(t0);
    return {worst_slack <= 1e-6 && rt < 5.0,
            fmt("max(ratio - (1 - a*kappa)) = %.2e over %d steps (limit 1e-6), %.2fs", worst_slack, steps_checked, rt)};
}

// 4
Verdict beta_schedule() {
    const agp::ConfidenceParams p{0.1, 1, 1.1, 2.0, 1.0};
    const long double pi = std::numbers::pi_v<long double>;
    const long double ref = 2.0L * std::log(2.0L * pi * pi / (3.0L * 0.1L)) +
                            2.0L * std::log(2.0L * std::sqrt(std::log(4.0L * 1.1L / 0.1L)));
    const double err = std::abs(agp::beta(1, p) - static_cast<double>(ref));
    bool increasing = true;
    for (std::size_t n = 2; n <= 10000; ++n) increasing &= agp::beta(n, p) > agp::beta(n - 1, p);
    return {err <= 1e-10 && increasing,
            fmt("beta(1) = %.12f, |err| %.1e (limit 1e-10), strictly increasing on [1, 1e4]: %s", agp::beta(1, p), err,
                increasing ? "yes" : "no")};
}

// 5
Verdict information_gain() {
    const auto t0 = Clock::now();
    const auto g = agp::info_gain_greedy(agp::KernelSpec(), agp::BoxDomain::unit(1), 0.01, 500, 0.1);
    const double err = std::abs(g[0] - 0.5 * std::log(101.0));
    bool diminishing = true;
    for (std::size_t t = 2; t < g.size(); ++t) diminishing &= g[t] - g[t - 1] <= g[t - 1] - g[t - 2] + 1e-12;
    // ρ_T = γ_T/(log T)² on T = 10..500: the tail must not trend upward and must stay under
    // the largest value seen in the head.
    std::vector<double> T, rho;
    for (std::size_t t = 10; t <= 500; ++t) {
        T.push_back(std::log(static_cast<double>(t)));
        rho.push_back(g[t - 1] / (T.back() * T.back()));
    }
    const std::size_t half = rho.size() / 2;
    const double head_max = *std::max_element(rho.begin(), rho.begin() + static_cast<long>(half));
    const double tail_max = *std::max_element(rho.begin() + static_cast<long>(half), rho.end());
    double mx = 0, my = 0, sxy = 0, sxx = 0;
    for (std::size_t i = half; i < rho.size(); ++i) mx += T[i], my += rho[i];
    mx /= static_cast<double>(rho.size() - half);
    my /= static_cast<double>(rho.size() - half);
    for (std::size_t i = half; i < rho.size(); ++i) sxy += (T[i] - mx) * (rho[i] - my), sxx += (T[i] - mx) * (T[i] - mx);
    const double slope = sxy / sxx;
    const double rt = seconds_since(t0);
    const bool ok = err <= 1e-10 && diminishing && tail_max <= head_max && slope <= 0.0 && rt < 30.0;
    return {ok, fmt("|gamma_1 - log(101)/2| %.1e, increments non-increasing: %s, ratio tail slope %.3e, "
                    "tail max %.4f <= head max %.4f, %.2fs",
                    err, diminishing ? "yes" : "no", slope, tail_max, head_max, rt)};
}

// 6
Verdict static_no_regret(Scenario& w0) {
    w0.get();
    const double r200 = w0.avg(200), r2000 = w0.avg(2000);
    const auto smooth = agp::rolling_mean(w0.result.aggregate.regret_avg, 50);
    std::size_t rises = 0;
    for (std::size_t k = 500; k < smooth.size(); ++k) rises += smooth[k] > smooth[k - 1] + 1e-12;
    // Runs whose decision settled away from the optimum keep a constant instantaneous regret.
    std::size_t settled_off = 0;
    for (const auto& run : w0.result.runs) settled_off += run.records.back().regret_inst > 0.1;
    const bool ok = r2000 < 0.5 * r200 && rises == 0 && w0.runtime < 180.0;
    return {ok, fmt("avg regret T=200 %.4f, T=2000 %.4f, ratio %.3f (limit < 0.5); smoothed tail rises %zu; "
                    "%.1fs (limit 180s); runs ending with r_k > 0.1: %zu/25",
                    r200, r2000, r2000 / r200, rises, w0.runtime, settled_off)};
}

// 7
Verdict plateau(Scenario& w0, Scenario& w2, Scenario& w4) {
    const double a0 = w0.avg(2000), a2 = w2.avg(2000), a4 = w4.avg(2000);
    const auto flat = [](Scenario& s) { return std::abs(s.avg(2000) - s.avg(1500)) / s.avg(1500); };
    const double f2 = flat(w2), f4 = flat(w4);
    const bool ok = a4 > a2 && a2 > a0 && f2 < 0.1 && f4 < 0.1;
    return {ok, fmt("T=2000 avg regret w=0.4 %.4f, w=0.2 %.4f, w=0 %.4f; last-quarter change w=0.2 %.1f%%, "
                    "w=0.4 %.1f%% (limit 10%%)",
                    a4, a2, a0, 100 * f2, 100 * f4)};
}

// 8
Verdict intermittency(Scenario& w0, Scenario& q4) {
    bool ok = true;
    std::string detail;
    for (std::size_t k : {500u, 1000u, 2000u}) {
        ok &= q4.avg(k) > w0.avg(k);
        detail += fmt("%sk=%zu: every_q(4) %.4f vs every_step %.4f", detail.empty() ? "" : "; ", k, q4.avg(k), w0.avg(k));
    }
    return {ok, detail};
}

// 9
Verdict vanishing(Scenario& van) {
    const double r200 = van.avg(200), r2000 = van.avg(2000);
    return {r2000 < 0.6 * r200, fmt("avg regret T=200 %.4f, T=2000 %.4f, ratio %.3f (limit < 0.6)", r200, r2000,
                                     r2000 / r200)};
}

// 10
Verdict baselines(Scenario& agp, std::vector<Scenario>& base) {
    bool ok = true;
    std::string detail = fmt("agp_ucb %.4f", agp.avg(2000));
    for (auto& b : base) {
        ok &= agp.avg(2000) < b.avg(2000);
        detail += fmt(", %s %.4f", std::string(agp::to_string(b.cfg.algorithm)).c_str(), b.avg(2000));
    }
    return {ok, detail};
}

// 11
Verdict uc_fairness(Scenario& agp, std::vector<Scenario>& base) {
    const auto [gap, level] = steady_uc(agp.get().aggregate);
    bool ok = true;
    std::string detail = fmt("agp_ucb gap %.4f mean %.4f", gap, level);
    for (auto& b : base) {
        const auto [bg, bl] = steady_uc(b.get().aggregate);
        ok &= gap < bg && level > bl;
        detail += fmt("; %s gap %.4f mean %.4f", std::string(agp::to_string(b.cfg.algorithm)).c_str(), bg, bl);
    }
    return {ok, detail};
}

// 12
Verdict ab_constants() {
    const auto t0 = Clock::now();
    const auto est = agp::estimate_ab(agp::KernelSpec(1.0), agp::BoxDomain::unit(1), 1.0, 2000, 201, 1);
    const double rt = seconds_since(t0);
    const bool ok = est.b == 2.0 && est.a >= 0.9 && est.a <= 1.3 && rt < 30.0;
    return {ok, fmt("b = %.17g (need exactly 2), C_eps = %.4f (need [0.9, 1.3]), %.2fs", est.b, est.a, rt)};
}

// 13
Verdict bound_sanity(Scenario& w0) {
    const auto& cfg = w0.get().config;
    const std::vector<std::size_t> Ts{100, 500, 2000};
    const auto rows = agp::bound_curve(cfg, Ts, agp::estimate_eta(cfg));
    std::size_t ok_runs = 0;
    for (const auto& run : w0.result.runs) {
        bool all = true;
        for (std::size_t i = 0; i < Ts.size(); ++i) all &= run.records[Ts[i] - 1].regret_cum <= rows[i].terms.total;
        ok_runs += all;
    }
    return {ok_runs >= 21, fmt("%zu/25 runs under the bound (need >= 21); bound %.1f / %.1f / %.1f at T = 100 / 500 / "
                               "2000",
                               ok_runs, rows[0].terms.total, rows[1].terms.total, rows[2].terms.total)};
}

// 14
Verdict learning_rate() {
    auto cfg = scenario_config(0.0);
    cfg.runs = 1;
    cfg.track_learning_rate = true;
    const auto run = agp::simulate_run(cfg, 0);
    const auto& ell = run.learning_rate;
    double total = 0.0, head = 0.0;
    const std::size_t cut = ell.size() - ell.size() / 4;
    for (std::size_t i = 0; i < ell.size(); ++i) {
        total += ell[i];
        if (i < cut) head += ell[i];
    }
    const double share = (total - head) / total;
    return {ell.size() == 2000 && share < 0.05,
            fmt("sum of l_n = %.3f, last-quarter share %.2f%% (limit 5%%) over %zu feedback events", total, 100 * share,
                ell.size())};
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    Scenario w0(scenario_config(0.0)), w2(scenario_config(0.2)), w4(scenario_config(0.4));
    Scenario q4(scenario_config(0.0)), van(scenario_config(0.4));
    q4.cfg.schedule = agp::FeedbackSchedule::every_q(4);
    van.cfg.trajectory = agp::TrajectoryKind::Vanishing;
    std::vector<Scenario> base;
    for (auto alg : {agp::Algorithm::Synthetic, agp::Algorithm::Zero2, agp::Algorithm::Zero4}) {
        base.emplace_back(scenario_config(0.4));
        base.back().cfg.algorithm = alg;
    }

    try {
        report(1, "gp_oracle", gp_oracle());
        report(2, "gradients", gradients());
        report(3, "solver_contraction", solver_contraction());
        report(4, "beta_schedule", beta_schedule());
        report(5, "information_gain", information_gain());
        report(6, "static_no_regret", static_no_regret(w0));
        report(7, "time_varying_plateau", plateau(w0, w2, w4));
        report(8, "intermittency", intermittency(w0, q4));
        report(9, "vanishing_changes", vanishing(van));
        report(10, "baseline_comparison", baselines(w4, base));
        report(11, "uc_fairness", uc_fairness(w4, base));
        report(12, "derivative_constants", ab_constants());
        report(13, "bound_sanity", bound_sanity(w0));
        report(14, "learning_rate_error", learning_rate());
    } catch (const std::exception& e) {
        std::printf("FAIL  acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 14 criteria failed; total %.1fs\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
