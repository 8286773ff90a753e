#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "agp/config.hpp"
#include "agp/domain.hpp"
#include "agp/gp.hpp"
#include "agp/loop.hpp"
#include "agp/objective.hpp"
#include "agp/regret.hpp"

namespace agp {

/// One row of a per-run log.
struct RunRecord {
    std::size_t run_id = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    double t = 0.0;
    Vector x;
    double f_star = 0.0;
    double f_x = 0.0;
    double regret_inst = 0.0;
    double regret_cum = 0.0;
    double regret_avg = 0.0;
    std::vector<double> uc;
    bool feedback = false;
    double beta_n = 0.0;
};

/// Posterior of one user block on a lattice after tick k, with the data it conditions on.
struct GpSnapshot {
    std::size_t k = 0;
    std::size_t block = 0;
    std::vector<Vector> grid;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> truth;
    std::vector<Observation> data;
};

struct RunResult {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    std::vector<RunRecord> records;
    std::vector<Vector> oracle_x;  // x*_k
    std::vector<Vector> target;    // x̄(t_k)
    /// ℓ_n for every feedback event, when tracking is enabled.
    std::vector<double> learning_rate;
    std::vector<GpSnapshot> snapshots;
};

/// Cross-run means per tick, accumulated in run order.
struct Aggregate {
    std::vector<std::size_t> k;
    std::vector<double> regret_avg;
    std::vector<double> regret_inst;
    std::vector<double> regret_cum;
    std::vector<std::vector<double>> uc;  // [user][tick]
    std::vector<double> feedback_rate;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RunResult> runs;
    Aggregate aggregate;
};

/// [0, r]^m
BoxDomain make_domain(const ExperimentConfig& cfg);
TimeVaryingQuadratic make_objective(const ExperimentConfig& cfg);
/// Users for one run; sample-path users are drawn from a stream derived from run_seed.
UserModel make_users(const ExperimentConfig& cfg, std::uint64_t run_seed);
LoopConfig make_loop_config(const ExperimentConfig& cfg);
std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t run_id);

/// True when every run sees the same users, so per-tick optima can be shared.
bool deterministic_users(const ExperimentConfig& cfg);

/// Per-tick optima x*_k, f*_k for k = 1..T.
std::vector<OracleResult> oracle_trajectory(const ExperimentConfig& cfg, const UserModel& users);

/// One seeded run. `shared_optima` may carry oracle_trajectory() for deterministic users.
RunResult simulate_run(const ExperimentConfig& cfg, std::size_t run_id,
                       const std::vector<OracleResult>* shared_optima = nullptr);

Aggregate aggregate(const std::vector<RunResult>& runs);

/// cfg.runs independent runs on up to cfg.workers threads, then aggregation.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes config.json, runs/run_NNN.csv, aggregate.csv, trajectory_run000.csv and, when
/// present, learning-rate logs and posterior snapshots. Returns the written paths.
std::vector<std::string> write_artifacts(const ExperimentResult& result, const std::string& dir);

struct SweepEntry {
    double omega = 0.0;
    FeedbackSchedule schedule;
    std::string directory;
    std::string aggregate;
};

/// Cartesian product of ω values and schedules; each cell is run and written to its own
/// directory below out_dir, and out_dir/manifest.json indexes them.
std::vector<SweepEntry> sweep(const ExperimentConfig& base, const std::vector<double>& omegas,
                              const std::vector<FeedbackSchedule>& schedules,
                              const std::string& out_dir);

/// PL contraction factor η = 1 - ακ̂ of the true objective at the first tick, c = 1/α.
double estimate_eta(const ExperimentConfig& cfg, std::size_t samples = 2000);

struct BoundRow {
    std::size_t T = 0;
    double gamma_T = 0.0;
    double beta_T = 0.0;
    BoundTerms terms;
};

/// Computable regret bound at each horizon in Ts for the learning dimension of cfg.
/// γ_T is the greedy information gain on a lattice of the learning domain; L, D_g and Δ
/// come from the engineering objective over ticks 1..max(Ts). every_q(q) feedback uses p = q.
std::vector<BoundRow> bound_curve(const ExperimentConfig& cfg, const std::vector<std::size_t>& Ts,
                                  double eta);

/// Lattice spacing used for γ_T.
double info_gain_resolution(std::size_t dim);

/// Decimal form used in every CSV: 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

}  // namespace agp
