#include "agp/ucb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

namespace agp {

void ConfidenceParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("confidence: delta must lie in (0, 1)");
    if (dim == 0) throw InputError("confidence: dimension must be >= 1");
    if (!(a > 0.0) || !(b > 0.0) || !(r > 0.0)) throw InputError("confidence: a, b, r must be positive");
}

double beta(std::size_t n, const ConfidenceParams& p) {
    p.validate();
    if (n == 0) throw InputError("beta: data counter n must be >= 1");
    const double nn = static_cast<double>(n);
    const double d = static_cast<double>(p.dim);
    const double pi2 = std::numbers::pi * std::numbers::pi;

    const double arg1 = 2.0 * nn * nn * pi2 / (3.0 * p.delta);
    const double arg_inner = 4.0 * d * p.a / p.delta;
    if (!(arg_inner > 1.0)) throw InputError("beta: 4da/delta must exceed 1");
    const double arg2 = d * nn * nn * p.b * p.r * std::sqrt(std::log(arg_inner));
    if (!(arg1 > 1.0) || !(arg2 > 1.0)) {
        std::ostringstream msg;
        msg << "beta: logarithm argument <= 1 (n=" << n << ", args " << arg1 << ", " << arg2 << ")";
        throw InputError(msg.str());
    }
    return 2.0 * std::log(arg1) + 2.0 * d * std::log(arg2);
}

UcbEvaluation ucb_evaluate(const GpPosterior& post, double beta_n, Point x) {
    if (!(beta_n >= 0.0)) throw InputError("ucb: beta must be non-negative");
    const auto pred = post.predict(x, true);
    const double s = std::sqrt(beta_n);
    return {pred.mean + s * pred.stddev, pred.mean_grad + s * pred.stddev_grad};
}

double ucb_value(const GpPosterior& post, double beta_n, Point x) {
    if (!(beta_n >= 0.0)) throw InputError("ucb: beta must be non-negative");
    const auto pred = post.predict(x, false);
    return pred.mean + std::sqrt(beta_n) * pred.stddev;
}

Vector ucb_grad(const GpPosterior& post, double beta_n, Point x) {
    return ucb_evaluate(post, beta_n, x).grad;
}

std::vector<double> ab_levels() {
    std::vector<double> levels;
    for (int i = 1; i <= 12; ++i) levels.push_back(0.5 * i);
    return levels;
}

AbEstimate estimate_ab(const KernelSpec& kernel, const BoxDomain& domain, double epsilon,
                       std::size_t n_paths, std::size_t grid_resolution, std::uint64_t seed) {
    if (kernel.family() != KernelFamily::SquaredExponential) {
        throw UnsupportedOperation("estimate_ab: requires the squared-exponential derivative kernel");
    }
    if (n_paths < 100) throw InputError("estimate_ab: need at least 100 sample paths");
    if (!(epsilon > 0.0)) throw InputError("estimate_ab: epsilon must be positive");
    if (domain.dim() > 2) throw UnsupportedOperation("estimate_ab: lattice sampling supports dimension <= 2");

    const double l2 = kernel.length_scale() * kernel.length_scale();
    AbEstimate est;
    est.b = std::sqrt(2.0 * kernel.output_variance() / l2 + 2.0 * epsilon);

    const auto nodes = domain.lattice(grid_resolution);
    const auto m = static_cast<Eigen::Index>(nodes.size());
    const auto levels = ab_levels();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (std::size_t j = 0; j < domain.dim(); ++j) {
        Matrix K(m, m);
        for (Eigen::Index p = 0; p < m; ++p) {
            for (Eigen::Index q = 0; q <= p; ++q) {
                K(p, q) = K(q, p) = kernel.derivative_kernel(nodes[static_cast<std::size_t>(p)],
                                                             nodes[static_cast<std::size_t>(q)], j);
            }
        }
        Matrix L;
        for (double jitter = 1e-10; jitter <= 1e-6; jitter *= 10.0) {
            Matrix A = K;
            A.diagonal().array() += jitter;
            Eigen::LLT<Matrix> llt(A);
            if (llt.info() == Eigen::Success) {
                L = llt.matrixL();
                break;
            }
        }
        if (L.size() == 0) throw NumericalError("estimate_ab: derivative Gram matrix not factorizable");

        std::vector<std::size_t> exceed(levels.size(), 0);
        Vector z(m);
        for (std::size_t path = 0; path < n_paths; ++path) {
            for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);
            const double sup = (L.triangularView<Eigen::Lower>() * z).cwiseAbs().maxCoeff();
            for (std::size_t l = 0; l < levels.size(); ++l) {
                if (sup > levels[l]) ++exceed[l];
            }
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
            AbTableRow row;
            row.coordinate = j;
            row.level = levels[l];
            row.frequency = static_cast<double>(exceed[l]) / static_cast<double>(n_paths);
            const double ml = levels[l] / est.b;
            row.ratio = row.frequency * std::exp(ml * ml);
            est.a = std::max(est.a, row.ratio);
            est.table.push_back(row);
        }
    }
    return est;
}

}  // namespace agp
