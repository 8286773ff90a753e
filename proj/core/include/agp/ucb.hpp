#pragma once

#include <cstdint>
#include <vector>

#include "agp/common.hpp"
#include "agp/domain.hpp"
#include "agp/gp.hpp"
#include "agp/kernel.hpp"

namespace agp {

/// Constants of the confidence schedule. a and b bound the tails of the sample-path
/// derivatives, Pr{sup |∂U/∂x_j| > M} <= a exp(-(M/b)²), on D ⊆ [0, r]^d.
struct ConfidenceParams {
    double delta = 0.1;
    std::size_t dim = 1;
    double a = 1.1;
    double b = 2.0;
    double r = 1.0;

    void validate() const;
};

/// β_n = 2 log(2n²π²/(3δ)) + 2d log(d n² b r sqrt(log(4da/δ))), n >= 1.
/// Throws InputError when any logarithm argument is <= 1.
double beta(std::size_t n, const ConfidenceParams& params);

/// Û(x) = μ(x) + sqrt(β) σ(x)
double ucb_value(const GpPosterior& post, double beta_n, Point x);
Vector ucb_grad(const GpPosterior& post, double beta_n, Point x);

struct UcbEvaluation {
    double value = 0.0;
    Vector grad;
};
/// Value and gradient from a single posterior solve.
UcbEvaluation ucb_evaluate(const GpPosterior& post, double beta_n, Point x);

struct AbTableRow {
    std::size_t coordinate = 0;
    double level = 0.0;      // M
    double frequency = 0.0;  // empirical Pr{sup |∂U/∂x_j| > M}
    double ratio = 0.0;      // frequency · exp((M/b)²)
};

struct AbEstimate {
    double a = 0.0;  // raw C_ε; callers may inflate it before use
    double b = 0.0;
    std::vector<AbTableRow> table;
};

/// Exceedance levels probed by estimate_ab: 0.5, 1.0, ..., 6.0.
std::vector<double> ab_levels();

/// Empirical estimate of the derivative tail constants for a squared-exponential kernel.
/// b = sqrt(2 s²/ℓ² + 2ε) analytically; a is the smallest C with
/// freq(M) <= C exp(-(M/b)²) on the level ladder, where freq is the exceedance frequency of
/// the lattice supremum of |∂U/∂x_j| over n_paths derivative-process draws.
AbEstimate estimate_ab(const KernelSpec& kernel, const BoxDomain& domain, double epsilon,
                       std::size_t n_paths, std::size_t grid_resolution, std::uint64_t seed);

}  // namespace agp
