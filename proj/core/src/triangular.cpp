// Kept free of Eigen so it can be built with machine-specific flags without changing the
// layout of any type shared with other translation units.
#include "triangular.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace agp::detail {
namespace {

// One pass over L serves all R right-hand sides.
template <int R>
void forward_solve(const double* chol, std::size_t n, double* rhs) {
    const double* row = chol;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, R> a0{}, a1{}, a2{}, a3{};
        std::size_t j = 0;
        for (; j + 4 <= i; j += 4) {
            const double l0 = row[j], l1 = row[j + 1], l2 = row[j + 2], l3 = row[j + 3];
            for (int r = 0; r < R; ++r) {
                a0[r] += l0 * rhs[j * R + r];
                a1[r] += l1 * rhs[(j + 1) * R + r];
                a2[r] += l2 * rhs[(j + 2) * R + r];
                a3[r] += l3 * rhs[(j + 3) * R + r];
            }
        }
        for (; j < i; ++j) {
            for (int r = 0; r < R; ++r) a0[r] += row[j] * rhs[j * R + r];
        }
        const double diag = row[i];
        for (int r = 0; r < R; ++r) {
            rhs[i * R + r] = (rhs[i * R + r] - ((a0[r] + a1[r]) + (a2[r] + a3[r]))) / diag;
        }
        row += i + 1;
    }
}

void forward_solve_dynamic(const double* chol, std::size_t n, double* rhs, std::size_t R) {
    const double* row = chol;
    std::vector<double> acc(R);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            for (std::size_t r = 0; r < R; ++r) acc[r] += row[j] * rhs[j * R + r];
        }
        for (std::size_t r = 0; r < R; ++r) rhs[i * R + r] = (rhs[i * R + r] - acc[r]) / row[i];
        row += i + 1;
    }
}

}  // namespace

void forward_solve_any(const double* chol, std::size_t n, double* rhs, std::size_t R) {
    switch (R) {
        case 1: forward_solve<1>(chol, n, rhs); break;
        case 2: forward_solve<2>(chol, n, rhs); break;
        case 3: forward_solve<3>(chol, n, rhs); break;
        default: forward_solve_dynamic(chol, n, rhs, R); break;
    }
}

}  // namespace agp::detail
