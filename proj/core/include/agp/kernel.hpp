#pragma once

#include <string_view>

#include "agp/common.hpp"

namespace agp {

enum class KernelFamily { SquaredExponential };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Stationary covariance function k(x, x') = s² exp(-|x - x'|² / (2ℓ²)).
///
/// Immutable after construction. output_variance s² is capped at 1 (bounded prior variance).
class KernelSpec {
public:
    explicit KernelSpec(double length_scale = 1.0, double output_variance = 1.0,
                        KernelFamily family = KernelFamily::SquaredExponential);

    KernelFamily family() const { return family_; }
    double length_scale() const { return length_scale_; }
    double output_variance() const { return output_variance_; }

    double eval(Point x, Point y) const;
    double eval(const Vector& x, const Vector& y) const { return eval(as_point(x), as_point(y)); }

    /// ∂k(x, y)/∂x.
    Vector grad_x(Point x, Point y) const;
    Vector grad_x(const Vector& x, const Vector& y) const {
        return grad_x(as_point(x), as_point(y));
    }

    /// Covariance of the j-th partial-derivative process:
    /// ∂²k/∂x_j∂y_j = k(x,y) [1 - (x_j - y_j)²/ℓ²] / ℓ².
    double derivative_kernel(Point x, Point y, std::size_t j) const;
    double derivative_kernel(const Vector& x, const Vector& y, std::size_t j) const {
        return derivative_kernel(as_point(x), as_point(y), j);
    }

    /// exp(-r²/(2ℓ²)) scaled by the output variance, for a precomputed squared distance.
    double from_squared_distance(double r2) const;

    bool operator==(const KernelSpec&) const = default;

private:
    KernelFamily family_;
    double length_scale_;
    double output_variance_;
    double inv_two_l2_;
};

/// Gram matrix over the rows of `points` (one point per row).
Matrix gram_matrix(const KernelSpec& kernel, const Matrix& points);

}  // namespace agp
