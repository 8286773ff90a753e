#include "agp/domain.hpp"

#include <algorithm>
#include <cmath>

namespace agp {

BoxDomain::BoxDomain(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() == 0 || lo_.size() != hi_.size()) {
        throw InputError("BoxDomain: lo and hi must be non-empty and of equal dimension");
    }
    for (Eigen::Index i = 0; i < lo_.size(); ++i) {
        if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || lo_[i] > hi_[i]) {
            throw InputError("BoxDomain: require finite lo <= hi componentwise");
        }
    }
}

BoxDomain BoxDomain::unit(std::size_t dim, double side) {
    const auto n = static_cast<Eigen::Index>(dim);
    return BoxDomain(Vector::Zero(n), Vector::Constant(n, side));
}

double BoxDomain::side() const { return (hi_ - lo_).maxCoeff(); }

bool BoxDomain::contains(Point x, double slack) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        if (x[i] < lo_[j] - slack || x[i] > hi_[j] + slack) return false;
    }
    return true;
}

Vector BoxDomain::clamp(Point x) const {
    if (x.size() != dim()) throw InputError("BoxDomain::clamp: dimension mismatch");
    Vector out(lo_.size());
    for (Eigen::Index i = 0; i < lo_.size(); ++i) {
        out[i] = std::clamp(x[static_cast<std::size_t>(i)], lo_[i], hi_[i]);
    }
    return out;
}

std::vector<Vector> BoxDomain::corners() const {
    const std::size_t d = dim();
    std::vector<Vector> out;
    out.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Vector c(lo_.size());
        for (std::size_t i = 0; i < d; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            c[j] = ((mask >> i) & 1U) ? hi_[j] : lo_[j];
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Vector> BoxDomain::lattice(std::size_t per_axis) const {
    if (per_axis < 2) throw InputError("BoxDomain::lattice: need at least 2 nodes per axis");
    const std::size_t d = dim();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= per_axis;
    std::vector<Vector> out;
    out.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        Vector p(lo_.size());
        for (std::size_t i = 0; i < d; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            const double frac = static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
            p[j] = idx[i] + 1 == per_axis ? hi_[j] : lo_[j] + frac * (hi_[j] - lo_[j]);
        }
        out.push_back(std::move(p));
        for (std::size_t i = d; i-- > 0;) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return out;
}

std::size_t BoxDomain::nodes_for_resolution(double resolution) const {
    if (!(resolution > 0.0)) throw InputError("BoxDomain: resolution must be positive");
    const double cells = std::ceil(side() / resolution - 1e-9);
    return std::max<std::size_t>(2, static_cast<std::size_t>(cells) + 1);
}

}  // namespace agp
