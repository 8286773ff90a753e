#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "agp/kernel.hpp"
#include "oracles.hpp"

using agp::KernelSpec;
using agp::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

}  // namespace

TEST(Kernel, EvalAtZeroDistanceIsOutputVariance) {
    const KernelSpec k;
    EXPECT_DOUBLE_EQ(k.eval(vec({0.3, 0.7}), vec({0.3, 0.7})), 1.0);
    const KernelSpec k2(0.5, 0.4);
    EXPECT_DOUBLE_EQ(k2.eval(vec({0.1}), vec({0.1})), 0.4);
}

TEST(Kernel, EvalAtUnitDistance) {
    const KernelSpec k;
    EXPECT_NEAR(k.eval(vec({0.0, 0.0}), vec({0.6, 0.8})), 0.60653065971263342, 1e-15);
}

TEST(Kernel, EvalDecaysWithDistance) {
    const KernelSpec k;
    EXPECT_LT(k.eval(vec({0.0}), vec({10.0})), 1e-20);
}

TEST(Kernel, EvalSymmetricAndBounded) {
    const KernelSpec k(0.7, 0.9);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto x = oracle::uniform_point(rng, 2), y = oracle::uniform_point(rng, 2);
        EXPECT_DOUBLE_EQ(k.eval(x, y), k.eval(y, x));
        EXPECT_GT(k.eval(x, y), 0.0);
        EXPECT_LE(k.eval(x, y), 0.9);
        EXPECT_NEAR(k.eval(x, y), oracle::se_kernel(x, y, 0.7, 0.9), 1e-15);
    }
}

TEST(Kernel, DimensionMismatchThrows) {
    const KernelSpec k;
    EXPECT_THROW(k.eval(vec({0.0}), vec({0.0, 1.0})), agp::InputError);
    EXPECT_THROW(k.grad_x(vec({0.0}), vec({0.0, 1.0})), agp::InputError);
}

TEST(Kernel, InvalidParametersThrow) {
    EXPECT_THROW(KernelSpec(0.0), agp::InputError);
    EXPECT_THROW(KernelSpec(1.0, 1.5), agp::InputError);
    EXPECT_THROW(KernelSpec(1.0, 0.0), agp::InputError);
}

TEST(Kernel, GradAtCoincidentPointsIsZero) {
    const KernelSpec k;
    EXPECT_EQ(k.grad_x(vec({0.2, 0.4}), vec({0.2, 0.4})), Vector::Zero(2));
}

TEST(Kernel, GradScalarClosedForm) {
    const KernelSpec k;
    const auto g = k.grad_x(vec({0.0}), vec({1.0}));
    EXPECT_NEAR(g[0], std::exp(-0.5), 1e-15);
}

TEST(Kernel, GradAntisymmetric) {
    const KernelSpec k(0.6);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto x = oracle::uniform_point(rng, 2), y = oracle::uniform_point(rng, 2);
        EXPECT_TRUE(k.grad_x(x, y).isApprox(-k.grad_x(y, x), 1e-14));
    }
}

TEST(Kernel, GradMatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 2; ++d) {
        const KernelSpec k(0.8);
        for (int i = 0; i < 100; ++i) {
            const auto x = oracle::uniform_point(rng, d), y = oracle::uniform_point(rng, d);
            const auto fd = oracle::fd_gradient([&](const Vector& p) { return k.eval(p, y); }, x);
            EXPECT_LE(oracle::rel_err(k.grad_x(x, y), fd), 1e-6) << "d=" << d << " i=" << i;
        }
    }
}

TEST(Kernel, DerivativeKernelExamples) {
    EXPECT_DOUBLE_EQ(KernelSpec(1.0).derivative_kernel(vec({0.3}), vec({0.3}), 0), 1.0);
    EXPECT_DOUBLE_EQ(KernelSpec(2.0).derivative_kernel(vec({0.3}), vec({0.3}), 0), 0.25);
    EXPECT_NEAR(KernelSpec(1.0).derivative_kernel(vec({0.0, 0.5}), vec({1.0, 0.5}), 0), 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(KernelSpec(0.5, 0.3).derivative_kernel(vec({0.2, 0.1}), vec({0.2, 0.1}), 1), 0.3 / 0.25);
    EXPECT_THROW(KernelSpec().derivative_kernel(vec({0.0}), vec({0.0}), 1), agp::InputError);
}

TEST(Kernel, DerivativeKernelIsMixedSecondDerivative) {
    // ∂²k/∂x_j∂y_j by nested central differences.
    const KernelSpec k(0.7);
    std::mt19937_64 rng(11);
    const double h = 1e-4;
    for (int i = 0; i < 20; ++i) {
        const auto x = oracle::uniform_point(rng, 2), y = oracle::uniform_point(rng, 2);
        for (std::size_t j = 0; j < 2; ++j) {
            const auto J = static_cast<Eigen::Index>(j);
            auto at = [&](double dx, double dy) {
                Vector a = x, b = y;
                a[J] += dx;
                b[J] += dy;
                return k.eval(a, b);
            };
            const double fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
            EXPECT_NEAR(k.derivative_kernel(x, y, j), fd, 1e-5);
        }
    }
}

TEST(Kernel, GramMatrixPositiveSemidefinite) {
    std::mt19937_64 rng(13);
    const KernelSpec k(1.0);
    for (int d = 1; d <= 2; ++d) {
        agp::Matrix pts(30, d);
        for (int i = 0; i < 30; ++i) pts.row(i) = oracle::uniform_point(rng, d).transpose();
        const auto G = agp::gram_matrix(k, pts);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<agp::Matrix>(G).eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(Kernel, FamilyNamesRoundTrip) {
    EXPECT_EQ(agp::kernel_family_from_string(agp::to_string(agp::KernelFamily::SquaredExponential)),
              agp::KernelFamily::SquaredExponential);
    EXPECT_THROW(agp::kernel_family_from_string("matern"), agp::InputError);
}
