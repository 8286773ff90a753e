#pragma once

#include <vector>

#include "agp/common.hpp"

namespace agp {

/// Axis-aligned box {x : lo <= x <= hi}.
class BoxDomain {
public:
    BoxDomain(Vector lo, Vector hi);

    /// [0, side]^dim
    static BoxDomain unit(std::size_t dim, double side = 1.0);

    std::size_t dim() const { return static_cast<std::size_t>(lo_.size()); }
    const Vector& lo() const { return lo_; }
    const Vector& hi() const { return hi_; }

    /// Largest side length; plays the role of r in D ⊆ [0, r]^d.
    double side() const;
    bool contains(Point x, double slack = 0.0) const;
    Vector clamp(Point x) const;
    Vector center() const { return 0.5 * (lo_ + hi_); }

    std::vector<Vector> corners() const;

    /// Regular lattice with `per_axis` nodes on every axis (per_axis >= 2), ordered with the
    /// first coordinate varying slowest.
    std::vector<Vector> lattice(std::size_t per_axis) const;

    /// Nodes per axis giving spacing no larger than `resolution` on the longest side.
    std::size_t nodes_for_resolution(double resolution) const;

private:
    Vector lo_;
    Vector hi_;
};

}  // namespace agp
