#pragma once

#include <cstdint>
#include <functional>

#include "agp/common.hpp"
#include "agp/domain.hpp"

namespace agp {

/// Step size α and number N_s of projected-gradient steps per tick.
struct SolverConfig {
    double alpha = 0.1;
    std::size_t ns_steps = 1;

    void validate() const;
};

using GradientFn = std::function<Vector(const Vector&)>;

/// Value/gradient pair of a function to be maximized.
struct SmoothFunction {
    std::function<double(const Vector&)> value;
    GradientFn grad;
};

/// Euclidean projection onto the box (componentwise clamp).
Vector project(const BoxDomain& domain, const Vector& y);

/// x⁺ = Π_D[x + α ∇φ(x)]
Vector pgd_step(const GradientFn& grad, const Vector& x, double alpha, const BoxDomain& domain);

/// N_s compositions of pgd_step starting from x0.
Vector run_inner(const SmoothFunction& phi, const Vector& x0, const SolverConfig& cfg,
                 const BoxDomain& domain);

/// Proximal-gradient PL measure
///   D(x, c) = -2c min_{y∈D} { -∇φ(x)ᵀ(y - x) + (c/2)|y - x|² },
/// whose inner minimizer is Π_D[x + ∇φ(x)/c]. Non-negative; equals |∇φ(x)|² without
/// active constraints.
double pl_gap(const SmoothFunction& phi, const Vector& x, double c, const BoxDomain& domain);

struct GridMaximum {
    Vector x;
    double value = 0.0;
};

/// Lattice search followed by projected-gradient polishing with backtracking from the best
/// node. polish_steps = 0 returns the best lattice node.
GridMaximum maximize_on_grid(const SmoothFunction& phi, const BoxDomain& domain,
                             std::size_t per_axis, std::size_t polish_steps);

/// Backtracking projected-gradient ascent from x0; never decreases φ.
GridMaximum polish(const SmoothFunction& phi, const BoxDomain& domain, Vector x0,
                   std::size_t steps, double initial_step = 0.1);

struct PlEstimate {
    double kappa = 0.0;
    double phi_star = 0.0;
    Vector x_star;
    std::size_t samples_used = 0;

    /// Contraction factor 1 - ακ of one projected-gradient step with c = 1/α.
    double eta(double alpha) const { return 1.0 - alpha * kappa; }
};

/// κ̂ = min over sampled x of ½ D(x, c) / (φ* - φ(x)), skipping points whose optimality gap
/// is below 1e-9. φ* comes from maximize_on_grid. Throws DegenerateInstance when every
/// sample is skipped.
PlEstimate estimate_pl_kappa(const SmoothFunction& phi, const BoxDomain& domain, double c,
                             std::size_t samples, std::uint64_t seed);

/// Largest spectral norm of the finite-difference Hessian of φ over a lattice: an empirical
/// Lipschitz constant Θ of ∇φ.
double estimate_smoothness(const GradientFn& grad, const BoxDomain& domain, std::size_t per_axis,
                           double h = 1e-5);

}  // namespace agp
