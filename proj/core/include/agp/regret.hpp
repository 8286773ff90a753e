#pragma once

#include <cstddef>
#include <vector>

#include "agp/common.hpp"
#include "agp/domain.hpp"
#include "agp/gp.hpp"
#include "agp/kernel.hpp"
#include "agp/loop.hpp"
#include "agp/objective.hpp"
#include "agp/solver.hpp"

namespace agp {

struct OracleResult {
    Vector x;
    double value = 0.0;
};

/// Lattice search with per_axis nodes followed by polish_steps of backtracking projected
/// gradient from the best node.
OracleResult oracle_opt(const SmoothFunction& f, const BoxDomain& domain, std::size_t per_axis,
                        std::size_t polish_steps);

/// f(x; t) = V(x; t) + γ Σ_b U_b(x_{S_b}) with the true satisfaction functions.
SmoothFunction true_objective(const EngineeringObjective& v, const UserModel& users, double gamma,
                              Tick tick);

/// Oracle for a quadratic engineering objective plus one scalar user per coordinate
/// (decision dimension 1 or 2). The users are tabulated on the lattice once, so each tick
/// costs one pass over the lattice plus the polish.
class SeparableOracle {
public:
    SeparableOracle(const TimeVaryingQuadratic& v, const UserModel& users, double gamma,
                    const BoxDomain& domain, std::size_t per_axis = 501,
                    std::size_t polish_steps = 50);

    OracleResult at(Tick tick) const;

private:
    const TimeVaryingQuadratic& v_;
    const UserModel& users_;
    double gamma_;
    BoxDomain domain_;
    std::size_t per_axis_;
    std::size_t polish_steps_;
    std::vector<std::vector<double>> nodes_;  // per axis
    std::vector<std::vector<double>> table_;  // γ U_i on the axis nodes
};

/// Per-step optimum, achieved value, instantaneous regret and running sums.
class RegretLedger {
public:
    void add(double f_star, double f_x);

    std::size_t size() const { return inst_.size(); }
    double f_star(std::size_t i) const { return f_star_[i]; }
    double f_x(std::size_t i) const { return f_x_[i]; }
    double instantaneous(std::size_t i) const { return inst_[i]; }
    /// R_i = Σ_{j <= i} r_j, summed in step order.
    double cumulative(std::size_t i) const { return cum_[i]; }
    double average(std::size_t i) const { return cum_[i] / static_cast<double>(i + 1); }
    double total() const { return cum_.empty() ? 0.0 : cum_.back(); }

private:
    std::vector<double> f_star_, f_x_, inst_, cum_;
};

/// Greedy estimate of γ_1..γ_T: each round adds the lattice point of maximal posterior
/// variance and accrues ½ log(1 + σ_t²(x)/σ²). Points may repeat unless `distinct` is set,
/// in which case T may not exceed the lattice size.
std::vector<double> info_gain_greedy(const KernelSpec& kernel, const BoxDomain& domain,
                                     double grid_resolution, std::size_t T, double noise_std,
                                     bool distinct = false);

struct BoundInputs {
    std::size_t T = 1;
    double delta = 0.1;
    double sigma = 0.1;  // feedback noise standard deviation
    std::size_t d = 1;
    double a = 1.1;
    double b = 2.0;
    double r = 1.0;
    double L = 1.0;
    double D_g = 1.0;
    double Delta = 0.0;
    double eta = 0.9;
    double gamma_T = 0.0;
    /// Solver steps per data point lie in [p, q]; p = q = 1 is the base bound.
    std::size_t p = 1;
    std::size_t q = 1;

    void validate() const;
};

struct BoundTerms {
    double C1 = 0.0;
    double C2 = 0.0;
    double beta_T = 0.0;
    double learning = 0.0;  // sqrt(C1 T β_T γ_T)
    double G_T = 0.0;
    double total = 0.0;     // learning + C2 + G_T
};

/// Computable part of the high-probability regret bound. The solver-inexactness constant
/// has no closed form and is left out.
BoundTerms theoretical_bound(const BoundInputs& in);

/// max over probes of |Û_curr - Û_prev|.
double learning_rate_error(const GpPosterior& prev, double beta_prev, const GpPosterior& curr,
                           double beta_curr, const std::vector<Vector>& probes);

/// Tracks posterior mean and variance of one GP on fixed probe points, extended by one
/// whitened row per observation (O(n P) per update) and rebuilt after a refactorization.
class ProbeTracker {
public:
    explicit ProbeTracker(std::vector<Vector> probes);

    /// Brings the probe statistics in line with `post`.
    void sync(const GpPosterior& post);

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& variance() const { return var_; }
    /// Û on the probes.
    std::vector<double> ucb(double beta) const;
    const std::vector<Vector>& probes() const { return probes_; }

private:
    void rebuild(const GpPosterior& post);

    std::vector<Vector> probes_;
    std::vector<std::vector<double>> whitened_;  // row i: (L⁻¹ k(X, probes))_i
    std::vector<double> mean_;
    std::vector<double> var_;
    std::vector<double> z_;  // L⁻¹ y
    std::size_t seen_ = 0;
    std::uint64_t refactors_ = 0;
    bool initialised_ = false;
};

/// max over the product lattice of |Σ_b Δ_b(x_b)| for per-block differences on their own
/// probes: max(Σ_b max Δ_b, -Σ_b min Δ_b).
double combine_separable_error(const std::vector<std::vector<double>>& deltas);

/// Per-block maxima of the true satisfaction functions on a fine lattice (plus polish),
/// used to express satisfaction as a fraction of the attainable maximum.
class UcNormalizer {
public:
    UcNormalizer(const UserModel& users, const BoxDomain& domain, double resolution = 1e-4);

    /// UC_b = U_b(x_{S_b}) / max U_b. Throws DegenerateInstance for a non-positive maximum.
    std::vector<double> uc(const Vector& x) const;
    const std::vector<double>& maxima() const { return maxima_; }

private:
    const UserModel& users_;
    std::vector<double> maxima_;
};

std::vector<double> uc_metric(const UserModel& users, const Vector& x, const BoxDomain& domain);

/// Trailing-window mean; the first window-1 entries average the available prefix.
std::vector<double> rolling_mean(const std::vector<double>& series, std::size_t window);

/// c sqrt(T (log T)²)/T for T >= 2, with c chosen so the curve passes through
/// (T_first, value_first).
std::vector<double> reference_rate(const std::vector<std::size_t>& T, std::size_t T_first,
                                   double value_first);

}  // namespace agp
