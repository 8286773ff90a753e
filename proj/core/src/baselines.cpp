#include "agp/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace agp {

namespace {

double checked_distance(double d) {
    if (std::isnan(d)) throw InputError("log-normal utility: decision is NaN");
    return std::max(d, kMinDistance);
}

}  // namespace

double lognormal_value(double xi, double d) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError("log-normal utility: xi must be positive");
    d = checked_distance(d);
    const double l = std::log(d);
    return std::exp(-l * l / (xi * xi)) / (xi * d);
}

double lognormal_grad(double xi, double d) {
    if (checked_distance(d) != d) return 0.0;
    return -lognormal_value(xi, d) * (1.0 + 2.0 * std::log(d) / (xi * xi)) / d;
}

LogNormalUtility::LogNormalUtility(double xi) : xi_(xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError("LogNormalUtility: xi must be positive");
}

double LogNormalUtility::value(Point x) const {
    if (x.size() != 1) throw InputError("LogNormalUtility: expects a scalar decision");
    return lognormal_value(xi_, x[0]);
}

Vector LogNormalUtility::grad(Point x) const {
    if (x.size() != 1) throw InputError("LogNormalUtility: expects a scalar decision");
    return Vector::Constant(1, lognormal_grad(xi_, x[0]));
}

double LogNormalUtility::argmax() const { return std::exp(-0.5 * xi_ * xi_); }

double LogNormalUtility::max_value() const { return std::exp(0.25 * xi_ * xi_) / xi_; }

void SyntheticUserModel::validate() const {
    if (xi.empty()) throw InputError("synthetic model: needs at least one user");
    for (double v : xi) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("synthetic model: xi must be positive");
    }
}

ZeroOrderState::ZeroOrderState(std::size_t users, std::size_t points)
    : points_(points), buffers_(users) {
    if (points != 2 && points != 4) throw InputError("ZeroOrderState: buffer length must be 2 or 4");
    if (users == 0) throw InputError("ZeroOrderState: needs at least one user");
}

void ZeroOrderState::push(std::size_t user, double d, double y) {
    auto& buf = buffers_.at(user);
    buf.push_back({d, y});
    if (buf.size() > points_) buf.pop_front();
}

double zero_order_grad(const ZeroOrderState& state, std::size_t user) {
    if (!state.full(user)) return 0.0;
    const auto& buf = state.buffer(user);
    if (state.points() == 2) {
        const double dd = buf[1].d - buf[0].d;
        if (std::abs(dd) < ZeroOrderState::kGuard) return 0.0;
        return (buf[1].y - buf[0].y) / dd;
    }
    double lo = buf.front().d, hi = buf.front().d, dm = 0.0, ym = 0.0;
    for (const auto& s : buf) {
        lo = std::min(lo, s.d);
        hi = std::max(hi, s.d);
        dm += s.d;
        ym += s.y;
    }
    if (hi - lo < ZeroOrderState::kGuard) return 0.0;
    dm /= static_cast<double>(buf.size());
    ym /= static_cast<double>(buf.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : buf) {
        sxy += (s.d - dm) * (s.y - ym);
        sxx += (s.d - dm) * (s.d - dm);
    }
    return sxy / sxx;
}

}  // namespace agp
