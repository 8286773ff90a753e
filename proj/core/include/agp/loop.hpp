#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "agp/baselines.hpp"
#include "agp/common.hpp"
#include "agp/domain.hpp"
#include "agp/gp.hpp"
#include "agp/kernel.hpp"
#include "agp/objective.hpp"
#include "agp/solver.hpp"
#include "agp/ucb.hpp"

namespace agp {

/// When the user answers: every tick, on the last tick of every block of q ticks, or
/// independently with probability p.
class FeedbackSchedule {
public:
    enum class Mode { EveryStep, EveryQ, Bernoulli };

    static FeedbackSchedule every_step() { return {}; }
    static FeedbackSchedule every_q(std::size_t q);
    static FeedbackSchedule bernoulli(double p);
    /// "every_step", "every_q(4)" or "bernoulli(0.5)".
    static FeedbackSchedule parse(std::string_view text);

    Mode mode() const { return mode_; }
    std::size_t q() const { return q_; }
    double p() const { return p_; }

    /// u is a uniform draw in [0, 1), consumed only in Bernoulli mode.
    bool fires(std::size_t k, double u) const;
    std::string describe() const;

    bool operator==(const FeedbackSchedule&) const = default;

private:
    Mode mode_ = Mode::EveryStep;
    std::size_t q_ = 1;
    double p_ = 1.0;
};

/// A group of decision coordinates judged by one satisfaction function.
struct UserBlock {
    std::vector<std::size_t> coords;
    UtilityPtr truth;
};

struct UserModel {
    std::vector<UserBlock> blocks;
    double noise_std = 0.1;
    FeedbackSchedule schedule;

    /// Blocks must be disjoint, in range and match their truth's dimension.
    void validate(std::size_t decision_dim) const;
    std::size_t size() const { return blocks.size(); }

    /// One 1-D block per coordinate.
    static UserModel separable(std::vector<UtilityPtr> truths, double noise_std,
                               FeedbackSchedule schedule);

    double value(std::size_t block, const Vector& x) const;
    /// Σ_b U_b(x_{S_b})
    double total(const Vector& x) const;
    /// Gradient of total() with respect to the full decision vector.
    Vector total_grad(const Vector& x) const;
};

/// U(x) = Σ_i u_i(x_i) with scalar u_i; presents separable users to a joint GP.
class AdditiveUtility final : public UtilityFunction {
public:
    explicit AdditiveUtility(std::vector<UtilityPtr> parts);

    std::size_t dim() const override { return parts_.size(); }
    double value(Point x) const override;
    Vector grad(Point x) const override;
    const std::vector<UtilityPtr>& parts() const { return parts_; }

private:
    std::vector<UtilityPtr> parts_;
};

/// x restricted to the given coordinates.
Vector restrict_to(const Vector& x, const std::vector<std::size_t>& coords);

enum class Algorithm { AgpUcb, Synthetic, Zero2, Zero4 };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

struct LoopConfig {
    SolverConfig solver;
    /// dim is the learning dimension, i.e. the size of each user block.
    ConfidenceParams confidence;
    KernelSpec kernel;
    /// GP noise variance; the simulated feedback noise std is UserModel::noise_std.
    double noise_variance = 0.01;
    double gamma = 1.0;
    Algorithm algorithm = Algorithm::AgpUcb;
    /// Synthetic model used by Algorithm::Synthetic (one ξ per block).
    SyntheticUserModel synthetic;

    void validate(const UserModel& users) const;
};

/// Feedback noise and schedule draws, each from its own stream so that every algorithm run
/// with the same seed sees the same noise at the same tick.
class RandomStreams {
public:
    explicit RandomStreams(std::uint64_t seed);

    /// One standard normal per block, drawn every tick whether or not feedback is given.
    std::vector<double> noise(std::size_t blocks);
    double schedule_uniform();

private:
    std::mt19937_64 noise_rng_;
    std::mt19937_64 schedule_rng_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
};

/// Optimization counter k, data counter n (the posteriors hold n - 1 observations), the
/// current decision and one belief per user block.
struct LoopState {
    std::size_t k = 1;
    std::size_t n = 1;
    Vector x;
    std::vector<GpPosterior> beliefs;
    double beta = 0.0;
    std::optional<ZeroOrderState> zero_order;

    /// Prediction of each belief at the point of its latest update, computed in the same
    /// solve as the update. With one inner step per tick this is where the next gradient is
    /// taken. Valid only while beliefs are changed through step().
    struct CachedPrediction {
        Vector x;
        GpPosterior::Prediction prediction;
    };
    std::vector<std::optional<CachedPrediction>> cache;
};

LoopState initial_state(const LoopConfig& cfg, const UserModel& users, const BoxDomain& domain);

struct StepOutcome {
    std::size_t k = 0;
    /// Data counter used to form the surrogate at this tick.
    std::size_t n = 0;
    Tick tick;
    Vector x;
    bool feedback = false;
    /// Noisy measurements y_b = U_b(x_{S_b}) + ε_b (drawn on every tick).
    std::vector<double> y;
    double beta = 0.0;
};

/// φ(x) = V(x; t) + γ Σ_b Û_b(x_{S_b}) for the current beliefs and β.
SmoothFunction ucb_surrogate(const LoopState& state, const EngineeringObjective& v,
                             const UserModel& users, const LoopConfig& cfg, Tick tick);

/// One projected-gradient step on V + γ Σ synthetic U_b; consumes no feedback.
Vector synthetic_pgd_step(const Vector& x, const EngineeringObjective& v, const UserModel& users,
                          const SyntheticUserModel& model, double gamma, double alpha,
                          const BoxDomain& domain, Tick tick);

/// Runs the configured algorithm for one tick and advances the counters.
StepOutcome step(LoopState& state, const EngineeringObjective& v, const UserModel& users,
                 const LoopConfig& cfg, const BoxDomain& domain, Tick tick, RandomStreams& streams);

/// Called after every tick with the updated state.
using StepObserver = std::function<void(const LoopState&, const StepOutcome&)>;

/// T ticks at t_k = k h from the domain center. Deterministic given seed.
std::vector<StepOutcome> run(std::size_t T, std::uint64_t seed, const EngineeringObjective& v,
                             const UserModel& users, const LoopConfig& cfg,
                             const BoxDomain& domain, double sampling_period,
                             const StepObserver& observer = {});

}  // namespace agp
