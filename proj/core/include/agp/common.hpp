#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace agp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Read-only view of a decision-space point.
using Point = std::span<const double>;

inline Point as_point(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vector to_vector(Point p) {
    return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
}

/// Invalid arguments or parameters outside an operation's domain.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Factorization breakdown and similar floating-point failures.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The instance admits no meaningful answer (flat objective, non-positive user maximum, ...).
class DegenerateInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One tick of the online loop: optimization counter k and wall time t_k.
struct Tick {
    std::size_t k = 1;
    double t = 0.0;
};

}  // namespace agp
