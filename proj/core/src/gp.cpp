#include "agp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "triangular.hpp"

namespace agp {

GpPosterior::GpPosterior(KernelSpec kernel, double noise_variance, std::size_t dim)
    : kernel_(kernel), noise_variance_(noise_variance), dim_(dim) {
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
        throw InputError("GpPosterior: noise variance must be positive");
    }
    if (dim == 0) throw InputError("GpPosterior: input dimension must be positive");
}

GpPosterior GpPosterior::fit(KernelSpec kernel, double noise_variance, std::size_t dim,
                             const std::vector<Observation>& data) {
    GpPosterior post(kernel, noise_variance, dim);
    for (const auto& obs : data) {
        post.check_dim(as_point(obs.x));
        post.inputs_.insert(post.inputs_.end(), obs.x.data(), obs.x.data() + obs.x.size());
        post.outputs_.push_back(obs.y);
    }
    if (!data.empty()) post.refactorize();
    return post;
}

void GpPosterior::check_dim(Point x) const {
    if (x.size() != dim_) {
        std::ostringstream msg;
        msg << "GpPosterior: expected a " << dim_ << "-dimensional point, got " << x.size();
        throw InputError(msg.str());
    }
}

Vector GpPosterior::whitened_cross_covariance(Point x) const {
    check_dim(x);
    const std::size_t n = size();
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) v[static_cast<Eigen::Index>(j)] = kernel_.eval(x, input(j));
    detail::forward_solve_any(chol_.data(), n, v.data(), 1);
    return v;
}

void GpPosterior::update(Point x, double y) { append(x, y, false); }

GpPosterior::Prediction GpPosterior::update_and_predict(Point x, double y) {
    auto pred = append(x, y, true);
    return pred ? *pred : predict(x, true);
}

std::optional<GpPosterior::Prediction> GpPosterior::append(Point x, double y, bool with_prediction) {
    check_dim(x);
    if (!std::isfinite(y)) throw InputError("GpPosterior::update: non-finite observation");
    const std::size_t n = size();
    const std::size_t R = with_prediction ? 1 + dim_ : 1;
    const double inv_l2 = 1.0 / (kernel_.length_scale() * kernel_.length_scale());

    // Column 0: L⁻¹ k_n(x), the new factor row. Columns 1..dim: L⁻¹ ∂k_n(x)/∂x_a.
    std::vector<double> rhs(n * R);
    for (std::size_t j = 0; j < n; ++j) {
        const Point xj = input(j);
        const double kj = kernel_.eval(x, xj);
        rhs[j * R] = kj;
        for (std::size_t a = 1; a < R; ++a) rhs[j * R + a] = -(x[a - 1] - xj[a - 1]) * inv_l2 * kj;
    }
    detail::forward_solve_any(chol_.data(), n, rhs.data(), R);

    const double prior = kernel_.eval(x, x);
    double ll = 0.0;
    for (std::size_t j = 0; j < n; ++j) ll += rhs[j * R] * rhs[j * R];
    const double c2 = prior + noise_variance_ - ll;

    inputs_.insert(inputs_.end(), x.begin(), x.end());
    outputs_.push_back(y);

    // In exact arithmetic c² >= σ²; falling well below it means the factor has lost accuracy.
    if (!(c2 >= 0.5 * noise_variance_) || !std::isfinite(c2)) {
        try {
            refactorize();
        } catch (...) {
            inputs_.resize(n * dim_);
            outputs_.pop_back();
            throw;
        }
        return std::nullopt;
    }
    const double c = std::sqrt(c2);
    double lz = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        chol_.push_back(rhs[j * R]);
        lz += rhs[j * R] * z_[j];
    }
    chol_.push_back(c);
    z_.push_back((y - lz) / c);
    if (!with_prediction) return std::nullopt;

    // Whitened vectors of the extended factor at x gain one trailing entry each:
    // (k(x,x) - |v|²)/c for the covariance and -vᵀg_a/c for the gradients (∂k(x,x) = 0).
    const auto d = static_cast<Eigen::Index>(dim_);
    Prediction out;
    out.mean_grad = Vector::Zero(d);
    out.variance_grad = Vector::Zero(d);
    const double v_last = (prior - ll) / c;
    double mean = v_last * z_[n];
    for (std::size_t j = 0; j < n; ++j) {
        const double v = rhs[j * R];
        mean += v * z_[j];
        for (std::size_t a = 0; a < dim_; ++a) {
            const double g = rhs[j * R + 1 + a];
            out.mean_grad[static_cast<Eigen::Index>(a)] += g * z_[j];
            out.variance_grad[static_cast<Eigen::Index>(a)] -= 2.0 * v * g;
        }
    }
    for (std::size_t a = 0; a < dim_; ++a) {
        double vg = 0.0;
        for (std::size_t j = 0; j < n; ++j) vg += rhs[j * R] * rhs[j * R + 1 + a];
        const double g_last = -vg / c;
        out.mean_grad[static_cast<Eigen::Index>(a)] += g_last * z_[n];
        out.variance_grad[static_cast<Eigen::Index>(a)] -= 2.0 * v_last * g_last;
    }
    out.mean = mean;
    out.variance = std::clamp(prior - ll - v_last * v_last, 0.0, prior);
    out.stddev = std::sqrt(out.variance);
    out.stddev_grad = out.variance_grad / (2.0 * std::max(out.stddev, kStdFloor));
    return out;
}

GpPosterior GpPosterior::updated(const Observation& obs) const {
    GpPosterior next(*this);
    next.update(obs);
    return next;
}

void GpPosterior::refactorize() {
    const std::size_t n = size();
    Matrix pts = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        inputs_.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim_));
    Matrix A = gram_matrix(kernel_, pts);
    A.diagonal().array() += noise_variance_;
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "GpPosterior: Cholesky factorization of K + sigma^2 I failed (n=" << n
            << ", noise variance=" << noise_variance_ << ", min diagonal=" << A.diagonal().minCoeff()
            << ")";
        throw NumericalError(msg.str());
    }
    const Matrix L = llt.matrixL();
    chol_.clear();
    chol_.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            chol_.push_back(L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    z_ = outputs_;
    detail::forward_solve_any(chol_.data(), n, z_.data(), 1);
    ++refactor_count_;
}

GpPosterior::Prediction GpPosterior::predict(Point x, bool with_gradients) const {
    check_dim(x);
    const std::size_t n = size();
    const std::size_t R = with_gradients ? 1 + dim_ : 1;
    const double inv_l2 = 1.0 / (kernel_.length_scale() * kernel_.length_scale());
    const auto d = static_cast<Eigen::Index>(dim_);

    Prediction out;
    out.mean_grad = Vector::Zero(d);
    out.variance_grad = Vector::Zero(d);
    out.stddev_grad = Vector::Zero(d);
    const double prior = kernel_.eval(x, x);

    std::vector<double> rhs(n * R);
    for (std::size_t j = 0; j < n; ++j) {
        const Point xj = input(j);
        const double kj = kernel_.eval(x, xj);
        rhs[j * R] = kj;
        if (with_gradients) {
            for (std::size_t a = 0; a < dim_; ++a) rhs[j * R + 1 + a] = -(x[a] - xj[a]) * inv_l2 * kj;
        }
    }
    detail::forward_solve_any(chol_.data(), n, rhs.data(), R);

    double mean = 0.0;
    double explained = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = rhs[j * R];
        mean += v * z_[j];
        explained += v * v;
        if (with_gradients) {
            for (std::size_t a = 0; a < dim_; ++a) {
                const double g = rhs[j * R + 1 + a];
                out.mean_grad[static_cast<Eigen::Index>(a)] += g * z_[j];
                out.variance_grad[static_cast<Eigen::Index>(a)] -= 2.0 * v * g;
            }
        }
    }
    out.mean = mean;
    out.variance = std::clamp(prior - explained, 0.0, prior);
    out.stddev = std::sqrt(out.variance);
    if (with_gradients) {
        out.stddev_grad = out.variance_grad / (2.0 * std::max(out.stddev, kStdFloor));
    }
    return out;
}

double GpPosterior::mean(Point x) const { return predict(x, false).mean; }
double GpPosterior::variance(Point x) const { return predict(x, false).variance; }
double GpPosterior::stddev(Point x) const { return predict(x, false).stddev; }
Vector GpPosterior::mean_grad(Point x) const { return predict(x, true).mean_grad; }
Vector GpPosterior::stddev_grad(Point x) const { return predict(x, true).stddev_grad; }

Vector GpPosterior::weights() const {
    const std::size_t n = size();
    Vector w = Eigen::Map<const Vector>(z_.data(), static_cast<Eigen::Index>(n));
    for (std::size_t i = n; i-- > 0;) {
        const double* row = chol_.data() + i * (i + 1) / 2;
        w[static_cast<Eigen::Index>(i)] /= row[i];
        const double wi = w[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < i; ++j) w[static_cast<Eigen::Index>(j)] -= row[j] * wi;
    }
    return w;
}

Matrix GpPosterior::factor() const {
    const std::size_t n = size();
    Matrix L = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = factor_row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
    }
    return L;
}

// ---------------------------------------------------------------------------------------

SamplePath::SamplePath(KernelSpec kernel, std::size_t dim, std::vector<double> grid,
                       std::vector<double> weights)
    : kernel_(kernel), dim_(dim), grid_(std::move(grid)), weights_(std::move(weights)) {
    if (grid_.size() != weights_.size() * dim_) {
        throw InputError("SamplePath: grid and weight sizes disagree");
    }
    values_.reserve(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) values_.push_back(value(grid_point(i)));
}

double SamplePath::value(Point x) const {
    if (x.size() != dim_) throw InputError("SamplePath: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) s += weights_[j] * kernel_.eval(x, grid_point(j));
    return s;
}

Vector SamplePath::grad(Point x) const {
    if (x.size() != dim_) throw InputError("SamplePath: dimension mismatch");
    const double inv_l2 = 1.0 / (kernel_.length_scale() * kernel_.length_scale());
    Vector g = Vector::Zero(static_cast<Eigen::Index>(dim_));
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        const Point gj = grid_point(j);
        const double wk = weights_[j] * kernel_.eval(x, gj);
        for (std::size_t a = 0; a < dim_; ++a) g[static_cast<Eigen::Index>(a)] -= (x[a] - gj[a]) * inv_l2 * wk;
    }
    return g;
}

SamplePathSampler::SamplePathSampler(KernelSpec kernel, const BoxDomain& domain,
                                     std::size_t grid_resolution)
    : kernel_(kernel), dim_(domain.dim()) {
    if (dim_ > 2) throw UnsupportedOperation("sample_path: lattice sampling supports dimension <= 2");
    if (grid_resolution < 2) throw InputError("sample_path: grid_resolution must be >= 2");
    const auto nodes = domain.lattice(grid_resolution);
    Matrix pts(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        pts.row(static_cast<Eigen::Index>(i)) = nodes[i].transpose();
        grid_.insert(grid_.end(), nodes[i].data(), nodes[i].data() + nodes[i].size());
    }
    const Matrix K = gram_matrix(kernel_, pts);
    for (; jitter_ <= 1e-6; jitter_ *= 10.0) {
        Matrix A = K;
        A.diagonal().array() += jitter_;
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            return;
        }
    }
    throw NumericalError("sample_path: lattice Gram matrix not positive definite even with jitter 1e-6");
}

SamplePath SamplePathSampler::draw(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(factor_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    // Lattice values K w with w = L⁻ᵀ z have covariance K (K + jitter I)⁻¹ K, i.e. K up to the
    // jitter, and the interpolant reproduces them exactly at the nodes.
    const Vector w = factor_.transpose().triangularView<Eigen::Upper>().solve(z);
    return SamplePath(kernel_, dim_, grid_, std::vector<double>(w.data(), w.data() + w.size()));
}

SamplePath sample_path(const KernelSpec& kernel, const BoxDomain& domain,
                       std::size_t grid_resolution, std::uint64_t seed) {
    return SamplePathSampler(kernel, domain, grid_resolution).draw(seed);
}

}  // namespace agp
