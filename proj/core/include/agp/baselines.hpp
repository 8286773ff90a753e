#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "agp/common.hpp"
#include "agp/gp.hpp"

namespace agp {

/// Decisions below this are clamped before evaluating a log-normal utility.
inline constexpr double kMinDistance = 1e-3;

/// U(d) = exp(-log(d)²/ξ²) / (ξ d) for d > 0.
double lognormal_value(double xi, double d);
/// dU/dd = -U(d) (1 + 2 log(d)/ξ²) / d; zero below the clamp, where U is held constant.
double lognormal_grad(double xi, double d);

/// One-dimensional log-normal-shaped utility, usable both as a synthetic one-fits-all model
/// and as a parametric ground-truth user.
class LogNormalUtility final : public UtilityFunction {
public:
    explicit LogNormalUtility(double xi);

    std::size_t dim() const override { return 1; }
    double value(Point x) const override;
    Vector grad(Point x) const override;

    double xi() const { return xi_; }
    /// Unique maximizer exp(-ξ²/2) and maximum exp(ξ²/4)/ξ.
    double argmax() const;
    double max_value() const;

private:
    double xi_;
};

/// Per-user shape parameters of the synthetic model.
struct SyntheticUserModel {
    std::vector<double> xi;

    void validate() const;
    std::size_t users() const { return xi.size(); }
    double value(std::size_t user, double d) const { return lognormal_value(xi.at(user), d); }
    double grad(std::size_t user, double d) const { return lognormal_grad(xi.at(user), d); }
};

/// Ring buffer of recent (decision, feedback) pairs per user, for difference-quotient
/// gradient estimates.
class ZeroOrderState {
public:
    /// Quotients whose decision spread is below this are suppressed to zero.
    static constexpr double kGuard = 1e-4;

    /// points ∈ {2, 4}
    ZeroOrderState(std::size_t users, std::size_t points);

    std::size_t users() const { return buffers_.size(); }
    std::size_t points() const { return points_; }

    void push(std::size_t user, double d, double y);
    bool full(std::size_t user) const { return buffers_.at(user).size() == points_; }

    struct Sample {
        double d;
        double y;
    };
    const std::deque<Sample>& buffer(std::size_t user) const { return buffers_.at(user); }

private:
    std::size_t points_;
    std::vector<std::deque<Sample>> buffers_;
};

/// Two-point mode: (y_k - y_{k-1}) / (d_k - d_{k-1}). Four-point mode: least-squares slope
/// over the buffer. Returns 0 when the buffer is not yet full or the decision spread is
/// below ZeroOrderState::kGuard.
double zero_order_grad(const ZeroOrderState& state, std::size_t user);

}  // namespace agp
