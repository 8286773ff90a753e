#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "agp/baselines.hpp"
#include "agp/experiment.hpp"
#include "agp/loop.hpp"
#include "agp/ucb.hpp"

namespace {

agp::GpPosterior filled_posterior(std::size_t n, std::size_t dim) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    agp::GpPosterior post(agp::KernelSpec(), 0.01, dim);
    agp::Vector x(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : x) c = u(rng);
        post.update(agp::as_point(x), u(rng));
    }
    return post;
}

// Appending the (n+1)-th observation, including the fused prediction at the new input.
void BM_UpdateAndPredict(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto base = filled_posterior(n, 1);
    const agp::Vector x = agp::Vector::Constant(1, 0.4);
    for (auto _ : state) {
        state.PauseTiming();
        auto post = base;
        state.ResumeTiming();
        benchmark::DoNotOptimize(post.update_and_predict(agp::as_point(x), 0.3));
    }
}
BENCHMARK(BM_UpdateAndPredict)->RangeMultiplier(4)->Range(64, 2048);

void BM_PredictWithGradients(benchmark::State& state) {
    const auto post = filled_posterior(static_cast<std::size_t>(state.range(0)), 1);
    const agp::Vector x = agp::Vector::Constant(1, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(post.predict(agp::as_point(x), true));
}
BENCHMARK(BM_PredictWithGradients)->RangeMultiplier(4)->Range(64, 2048);

void BM_UcbGradient(benchmark::State& state) {
    const auto post = filled_posterior(static_cast<std::size_t>(state.range(0)), 2);
    agp::Vector x(2);
    x << 0.3, 0.6;
    for (auto _ : state) benchmark::DoNotOptimize(agp::ucb_evaluate(post, 40.0, agp::as_point(x)));
}
BENCHMARK(BM_UcbGradient)->Arg(256)->Arg(1024);

// A full seeded run of the default two-user scenario; time per tick is reported.
void BM_LoopRun(benchmark::State& state) {
    agp::ExperimentConfig cfg;
    cfg.T = static_cast<std::size_t>(state.range(0));
    cfg.omega = 0.4;
    const auto v = agp::make_objective(cfg);
    const auto users = agp::make_users(cfg, 1);
    const auto loop = agp::make_loop_config(cfg);
    const auto domain = agp::make_domain(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agp::run(cfg.T, 1, v, users, loop, domain, cfg.sampling_period));
    }
    state.counters["per_tick"] =
        benchmark::Counter(static_cast<double>(cfg.T), benchmark::Counter::kIsIterationInvariantRate |
                                                           benchmark::Counter::kInvert);
}
BENCHMARK(BM_LoopRun)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SeparableOracleTick(benchmark::State& state) {
    agp::ExperimentConfig cfg;
    cfg.omega = 0.4;
    const auto v = agp::make_objective(cfg);
    const auto users = agp::make_users(cfg, 1);
    const agp::SeparableOracle oracle(v, users, cfg.gamma, agp::make_domain(cfg), 501, 50);
    std::size_t k = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle.at({k, 0.1 * static_cast<double>(k)}));
        ++k;
    }
}
BENCHMARK(BM_SeparableOracleTick);

}  // namespace

BENCHMARK_MAIN();
