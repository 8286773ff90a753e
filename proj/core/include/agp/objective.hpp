#pragma once

#include <string_view>
#include <vector>

#include "agp/common.hpp"
#include "agp/domain.hpp"

namespace agp {

/// Known, time-varying engineering reward V(x; t) (concave in x).
class EngineeringObjective {
public:
    virtual ~EngineeringObjective() = default;
    virtual std::size_t dim() const = 0;
    virtual double value(Point x, Tick tick) const = 0;
    virtual Vector grad(Point x, Tick tick) const = 0;
};

enum class TrajectoryKind { Periodic, Vanishing };

std::string_view to_string(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_string(std::string_view name);

/// Component-wise target x̄(t) = base + amplitude · sin(π ω t), optionally damped by 1/sqrt(k).
class TargetTrajectory {
public:
    static constexpr double kBase = 0.33;
    static constexpr double kAmplitude = 0.25;

    TargetTrajectory(std::size_t dim, double omega, TrajectoryKind kind = TrajectoryKind::Periodic);

    std::size_t dim() const { return dim_; }
    double omega() const { return omega_; }
    TrajectoryKind kind() const { return kind_; }

    Vector at(Tick tick) const;

private:
    std::size_t dim_;
    double omega_;
    TrajectoryKind kind_;
};

Vector target_trajectory(double t, double omega, std::size_t dim);
Vector vanishing_target(double t, double omega, std::size_t k, std::size_t dim);

/// V(x; t) = -½ (x - x̄(t))ᵀ Q (x - x̄(t)).
///
/// gamma is the weight of the user term in the composed objective V + γ Σ U_i; it is
/// carried here but does not enter value() or grad().
class TimeVaryingQuadratic final : public EngineeringObjective {
public:
    TimeVaryingQuadratic(Matrix q, TargetTrajectory target, double gamma = 1.0);

    std::size_t dim() const override { return target_.dim(); }
    double value(Point x, Tick tick) const override;
    Vector grad(Point x, Tick tick) const override;

    const Matrix& q() const { return q_; }
    const TargetTrajectory& target() const { return target_; }
    double gamma() const { return gamma_; }
    /// λ_max(Q): Lipschitz constant of ∇V.
    double smoothness() const { return lambda_max_; }

    /// Default coupled weight matrix: ones on the diagonal, 0.25 off the diagonal.
    static Matrix default_q(std::size_t dim);

private:
    Matrix q_;
    TargetTrajectory target_;
    double gamma_;
    double lambda_max_;
};

/// L, D_g and Δ for an objective over a domain and a set of probed ticks.
struct ObjectiveMetadata {
    double smoothness = 0.0;     // L
    double grad_bound = 0.0;     // D_g = max ‖∇V‖_∞
    double drift_bound = 0.0;    // Δ = max_k Δ_k
};

/// Δ_k = max_{x∈D} |V(x; t_k) - V(x; t_{k-1})|. Exact: for a fixed Q the difference is
/// affine in x, so the maximum is attained at a corner of the box.
double drift(const TimeVaryingQuadratic& v, const BoxDomain& domain, Tick current, Tick previous);

/// Same quantity by brute force on a lattice with the given spacing (any objective).
double drift_on_grid(const EngineeringObjective& v, const BoxDomain& domain, Tick current,
                     Tick previous, double resolution = 0.01);

/// ticks must be ordered; Δ is taken over consecutive pairs.
ObjectiveMetadata metadata(const TimeVaryingQuadratic& v, const BoxDomain& domain,
                           const std::vector<Tick>& ticks);

}  // namespace agp
