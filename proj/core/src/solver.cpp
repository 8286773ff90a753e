#include "agp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace agp {

void SolverConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("solver: alpha must be positive");
    if (ns_steps == 0) throw InputError("solver: ns_steps must be >= 1");
}

Vector project(const BoxDomain& domain, const Vector& y) { return domain.clamp(as_point(y)); }

Vector pgd_step(const GradientFn& grad, const Vector& x, double alpha, const BoxDomain& domain) {
    return project(domain, x + alpha * grad(x));
}

Vector run_inner(const SmoothFunction& phi, const Vector& x0, const SolverConfig& cfg,
                 const BoxDomain& domain) {
    cfg.validate();
    Vector x = x0;
    for (std::size_t s = 0; s < cfg.ns_steps; ++s) x = pgd_step(phi.grad, x, cfg.alpha, domain);
    return x;
}

double pl_gap(const SmoothFunction& phi, const Vector& x, double c, const BoxDomain& domain) {
    if (!(c > 0.0)) throw InputError("pl_gap: c must be positive");
    const Vector g = phi.grad(x);
    const Vector step = project(domain, x + g / c) - x;
    const double inner = -g.dot(step) + 0.5 * c * step.squaredNorm();
    return std::max(0.0, -2.0 * c * inner);
}

GridMaximum polish(const SmoothFunction& phi, const BoxDomain& domain, Vector x0,
                   std::size_t steps, double initial_step) {
    GridMaximum best{std::move(x0), 0.0};
    best.value = phi.value(best.x);
    double s = initial_step;
    for (std::size_t it = 0; it < steps && s > 1e-14; ++it) {
        const Vector g = phi.grad(best.x);
        if (g.squaredNorm() == 0.0) break;
        for (int tries = 0; tries < 60; ++tries) {
            Vector cand = project(domain, best.x + s * g);
            const double v = phi.value(cand);
            if (v >= best.value) {
                best.x = std::move(cand);
                best.value = v;
                s *= 1.5;
                break;
            }
            s *= 0.5;
        }
    }
    return best;
}

GridMaximum maximize_on_grid(const SmoothFunction& phi, const BoxDomain& domain,
                             std::size_t per_axis, std::size_t polish_steps) {
    GridMaximum best{Vector(), -std::numeric_limits<double>::infinity()};
    for (auto& node : domain.lattice(per_axis)) {
        const double v = phi.value(node);
        if (v > best.value) best = {std::move(node), v};
    }
    if (polish_steps == 0) return best;
    return polish(phi, domain, best.x, polish_steps, domain.side() / static_cast<double>(per_axis));
}

PlEstimate estimate_pl_kappa(const SmoothFunction& phi, const BoxDomain& domain, double c,
                             std::size_t samples, std::uint64_t seed) {
    if (!(c > 0.0)) throw InputError("estimate_pl_kappa: c must be positive");
    const std::size_t per_axis = domain.dim() == 1 ? 2001 : (domain.dim() == 2 ? 201 : 11);
    auto star = maximize_on_grid(phi, domain, per_axis, 500);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> points;
    points.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        Vector x(domain.lo().size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            x[j] = domain.lo()[j] + unit(rng) * (domain.hi()[j] - domain.lo()[j]);
        }
        const double v = phi.value(x);
        if (v > star.value) star = polish(phi, domain, x, 500);
        points.push_back(std::move(x));
    }

    PlEstimate est;
    est.phi_star = star.value;
    est.x_star = star.x;
    est.kappa = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
        const double gap = star.value - phi.value(x);
        if (gap < 1e-9) continue;
        est.kappa = std::min(est.kappa, 0.5 * pl_gap(phi, x, c, domain) / gap);
        ++est.samples_used;
    }
    if (est.samples_used == 0) {
        throw DegenerateInstance("estimate_pl_kappa: every sampled optimality gap is below 1e-9");
    }
    return est;
}

double estimate_smoothness(const GradientFn& grad, const BoxDomain& domain, std::size_t per_axis,
                           double h) {
    const auto d = static_cast<Eigen::Index>(domain.dim());
    double worst = 0.0;
    for (const auto& x : domain.lattice(per_axis)) {
        Matrix H(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            Vector xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            H.col(j) = (grad(xp) - grad(xm)) / (2.0 * h);
        }
        const Matrix S = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues().cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace agp
