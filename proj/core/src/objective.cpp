#include "agp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace agp {

std::string_view to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::Periodic: return "periodic";
        case TrajectoryKind::Vanishing: return "vanishing";
    }
    return "unknown";
}

TrajectoryKind trajectory_kind_from_string(std::string_view name) {
    if (name == "periodic") return TrajectoryKind::Periodic;
    if (name == "vanishing") return TrajectoryKind::Vanishing;
    throw InputError("unknown trajectory kind '" + std::string(name) + "'");
}

TargetTrajectory::TargetTrajectory(std::size_t dim, double omega, TrajectoryKind kind)
    : dim_(dim), omega_(omega), kind_(kind) {
    if (dim == 0) throw InputError("TargetTrajectory: dimension must be positive");
    if (!std::isfinite(omega)) throw InputError("TargetTrajectory: omega must be finite");
}

Vector TargetTrajectory::at(Tick tick) const {
    return kind_ == TrajectoryKind::Periodic ? target_trajectory(tick.t, omega_, dim_)
                                             : vanishing_target(tick.t, omega_, tick.k, dim_);
}

Vector target_trajectory(double t, double omega, std::size_t dim) {
    const double v = TargetTrajectory::kBase +
                     TargetTrajectory::kAmplitude * std::sin(std::numbers::pi * omega * t);
    return Vector::Constant(static_cast<Eigen::Index>(dim), v);
}

Vector vanishing_target(double t, double omega, std::size_t k, std::size_t dim) {
    if (k == 0) throw InputError("vanishing_target: step index must be >= 1");
    const double v = TargetTrajectory::kBase + TargetTrajectory::kAmplitude *
                                                   std::sin(std::numbers::pi * omega * t) /
                                                   std::sqrt(static_cast<double>(k));
    return Vector::Constant(static_cast<Eigen::Index>(dim), v);
}

TimeVaryingQuadratic::TimeVaryingQuadratic(Matrix q, TargetTrajectory target, double gamma)
    : q_(std::move(q)), target_(std::move(target)), gamma_(gamma) {
    const auto m = static_cast<Eigen::Index>(target_.dim());
    if (q_.rows() != m || q_.cols() != m) throw InputError("TimeVaryingQuadratic: Q must be m x m");
    if (!q_.isApprox(q_.transpose(), 1e-12)) throw InputError("TimeVaryingQuadratic: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q_);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw InputError("TimeVaryingQuadratic: Q must be positive definite");
    }
    if (!(gamma > 0.0)) throw InputError("TimeVaryingQuadratic: gamma must be positive");
    lambda_max_ = eig.eigenvalues().maxCoeff();
}

Matrix TimeVaryingQuadratic::default_q(std::size_t dim) {
    const auto m = static_cast<Eigen::Index>(dim);
    Matrix q = Matrix::Constant(m, m, 0.25);
    q.diagonal().setOnes();
    return q;
}

double TimeVaryingQuadratic::value(Point x, Tick tick) const {
    if (x.size() != dim()) throw InputError("TimeVaryingQuadratic: dimension mismatch");
    const Vector e = to_vector(x) - target_.at(tick);
    return -0.5 * e.dot(q_ * e);
}

Vector TimeVaryingQuadratic::grad(Point x, Tick tick) const {
    if (x.size() != dim()) throw InputError("TimeVaryingQuadratic: dimension mismatch");
    return -(q_ * (to_vector(x) - target_.at(tick)));
}

double drift(const TimeVaryingQuadratic& v, const BoxDomain& domain, Tick current, Tick previous) {
    double worst = 0.0;
    for (const auto& c : domain.corners()) {
        worst = std::max(worst, std::abs(v.value(as_point(c), current) - v.value(as_point(c), previous)));
    }
    return worst;
}

double drift_on_grid(const EngineeringObjective& v, const BoxDomain& domain, Tick current,
                     Tick previous, double resolution) {
    double worst = 0.0;
    for (const auto& x : domain.lattice(domain.nodes_for_resolution(resolution))) {
        worst = std::max(worst, std::abs(v.value(as_point(x), current) - v.value(as_point(x), previous)));
    }
    return worst;
}

ObjectiveMetadata metadata(const TimeVaryingQuadratic& v, const BoxDomain& domain,
                           const std::vector<Tick>& ticks) {
    ObjectiveMetadata meta;
    meta.smoothness = v.smoothness();
    const auto corners = domain.corners();
    for (const auto& tick : ticks) {
        for (const auto& c : corners) {
            meta.grad_bound = std::max(meta.grad_bound, v.grad(as_point(c), tick).cwiseAbs().maxCoeff());
        }
    }
    for (std::size_t i = 1; i < ticks.size(); ++i) {
        meta.drift_bound = std::max(meta.drift_bound, drift(v, domain, ticks[i], ticks[i - 1]));
    }
    return meta;
}

}  // namespace agp
