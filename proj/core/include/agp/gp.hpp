#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "agp/common.hpp"
#include "agp/domain.hpp"
#include "agp/kernel.hpp"

namespace agp {

/// A scalar function of (a block of) the decision vector with an analytic gradient.
/// Used for true user-satisfaction functions and synthetic models alike.
class UtilityFunction {
public:
    virtual ~UtilityFunction() = default;
    virtual std::size_t dim() const = 0;
    virtual double value(Point x) const = 0;
    virtual Vector grad(Point x) const = 0;
};

using UtilityPtr = std::shared_ptr<const UtilityFunction>;

/// A noisy utility measurement y = U(x) + ε.
struct Observation {
    Vector x;
    double y = 0.0;
};

/// Zero-mean GP posterior conditioned on noisy observations.
///
/// The lower Cholesky factor of K_n + σ²I is kept row-packed and grown by one row per
/// observation, so an update costs O(n²) and a query O(n²) with a single pass over the
/// factor. Together with the factor we keep z = L⁻¹y, which gives μ(x) = (L⁻¹k(x))ᵀz
/// without a back substitution.
///
/// Not safe for concurrent mutation; const queries may run concurrently.
class GpPosterior {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
        double stddev = 0.0;
        Vector mean_grad;
        Vector variance_grad;
        Vector stddev_grad;
    };

    /// Posterior std below this is floored when dividing in the std gradient.
    static constexpr double kStdFloor = 1e-9;

    GpPosterior(KernelSpec kernel, double noise_variance, std::size_t dim);

    /// Builds a posterior from all observations at once with a dense factorization.
    static GpPosterior fit(KernelSpec kernel, double noise_variance, std::size_t dim,
                           const std::vector<Observation>& data);

    const KernelSpec& kernel() const { return kernel_; }
    double noise_variance() const { return noise_variance_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return outputs_.size(); }

    Point input(std::size_t i) const { return {inputs_.data() + i * dim_, dim_}; }
    double output(std::size_t i) const { return outputs_[i]; }

    void update(Point x, double y);
    void update(const Observation& obs) { update(as_point(obs.x), obs.y); }
    GpPosterior updated(const Observation& obs) const;
    /// update(x, y) followed by predict(x, true) on the result, sharing one solve.
    Prediction update_and_predict(Point x, double y);

    double mean(Point x) const;
    double variance(Point x) const;
    double stddev(Point x) const;
    Vector mean_grad(Point x) const;
    Vector stddev_grad(Point x) const;

    /// Mean, variance and (optionally) their gradients from one solve against the factor.
    Prediction predict(Point x, bool with_gradients = true) const;

    /// w = (K_n + σ²I)⁻¹ y_n.
    Vector weights() const;
    /// Dense copy of the lower-triangular factor.
    Matrix factor() const;
    /// Row i of the factor (length i + 1).
    std::span<const double> factor_row(std::size_t i) const {
        return {chol_.data() + i * (i + 1) / 2, i + 1};
    }
    /// Increments whenever the factor is rebuilt from scratch instead of extended.
    std::uint64_t refactor_count() const { return refactor_count_; }

    /// v = L⁻¹ k_n(x).
    Vector whitened_cross_covariance(Point x) const;

private:
    void check_dim(Point x) const;
    void refactorize();
    std::optional<Prediction> append(Point x, double y, bool with_prediction);

    KernelSpec kernel_;
    double noise_variance_;
    std::size_t dim_;
    std::vector<double> inputs_;   // n × dim, row-major
    std::vector<double> outputs_;  // y_n
    std::vector<double> chol_;     // packed rows of L
    std::vector<double> z_;        // L⁻¹ y_n
    std::uint64_t refactor_count_ = 0;
};

/// A GP sample path: an exact joint draw on a regular lattice, extended off the lattice by
/// noise-free conditioning on the drawn values, U(x) = Σ_j w_j k(x, g_j).
class SamplePath final : public UtilityFunction {
public:
    SamplePath(KernelSpec kernel, std::size_t dim, std::vector<double> grid,
               std::vector<double> weights);

    std::size_t dim() const override { return dim_; }
    double value(Point x) const override;
    Vector grad(Point x) const override;

    std::size_t grid_size() const { return weights_.size(); }
    Point grid_point(std::size_t i) const { return {grid_.data() + i * dim_, dim_}; }
    const std::vector<double>& values() const { return values_; }

private:
    KernelSpec kernel_;
    std::size_t dim_;
    std::vector<double> grid_;
    std::vector<double> weights_;
    std::vector<double> values_;
};

/// Factorizes the lattice Gram matrix once and draws any number of sample paths from it.
class SamplePathSampler {
public:
    static constexpr double kJitter = 1e-10;

    SamplePathSampler(KernelSpec kernel, const BoxDomain& domain, std::size_t grid_resolution);

    SamplePath draw(std::uint64_t seed) const;
    std::size_t grid_size() const { return static_cast<std::size_t>(factor_.rows()); }
    /// Jitter actually used (escalated from kJitter if the factorization broke down).
    double jitter() const { return jitter_; }

private:
    KernelSpec kernel_;
    std::size_t dim_;
    std::vector<double> grid_;
    Matrix factor_;
    double jitter_ = kJitter;
};

/// Single draw; grid_resolution is the number of lattice nodes per axis (>= 2), dim <= 2.
SamplePath sample_path(const KernelSpec& kernel, const BoxDomain& domain,
                       std::size_t grid_resolution, std::uint64_t seed);

}  // namespace agp
