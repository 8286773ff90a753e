#include "agp/kernel.hpp"

#include <cmath>
#include <string>

namespace agp {
namespace {

double squared_distance(Point x, Point y) {
    if (x.size() != y.size()) throw InputError("kernel: dimension mismatch between points");
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        r2 += d * d;
    }
    return r2;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::SquaredExponential:
            return "squared_exponential";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
    if (name == "squared_exponential" || name == "se") return KernelFamily::SquaredExponential;
    throw InputError("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec::KernelSpec(double length_scale, double output_variance, KernelFamily family)
    : family_(family), length_scale_(length_scale), output_variance_(output_variance) {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
        throw InputError("KernelSpec: length_scale must be positive and finite");
    }
    if (!(output_variance > 0.0) || output_variance > 1.0) {
        throw InputError("KernelSpec: output_variance must lie in (0, 1]");
    }
    inv_two_l2_ = 1.0 / (2.0 * length_scale * length_scale);
}

double KernelSpec::from_squared_distance(double r2) const {
    return output_variance_ * std::exp(-r2 * inv_two_l2_);
}

double KernelSpec::eval(Point x, Point y) const {
    return from_squared_distance(squared_distance(x, y));
}

Vector KernelSpec::grad_x(Point x, Point y) const {
    const double k = eval(x, y);
    const double inv_l2 = 1.0 / (length_scale_ * length_scale_);
    Vector g(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[static_cast<Eigen::Index>(i)] = -(x[i] - y[i]) * inv_l2 * k;
    }
    return g;
}

double KernelSpec::derivative_kernel(Point x, Point y, std::size_t j) const {
    if (family_ != KernelFamily::SquaredExponential) {
        throw UnsupportedOperation("derivative_kernel: only available for the squared-exponential family");
    }
    if (j >= x.size()) throw InputError("derivative_kernel: coordinate index out of range");
    const double k = eval(x, y);
    const double inv_l2 = 1.0 / (length_scale_ * length_scale_);
    const double dj = x[j] - y[j];
    return k * (1.0 - dj * dj * inv_l2) * inv_l2;
}

Matrix gram_matrix(const KernelSpec& kernel, const Matrix& points) {
    const Eigen::Index n = points.rows();
    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = kernel.output_variance();
        for (Eigen::Index j = 0; j < i; ++j) {
            const double r2 = (points.row(i) - points.row(j)).squaredNorm();
            K(i, j) = K(j, i) = kernel.from_squared_distance(r2);
        }
    }
    return K;
}

}  // namespace agp
