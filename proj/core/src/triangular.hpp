#pragma once

#include <cstddef>

namespace agp::detail {

/// Solves L V = B in place for R right-hand sides stored interleaved (row j holds the R
/// values for index j). L is row-packed lower triangular with n rows.
void forward_solve_any(const double* chol, std::size_t n, double* rhs, std::size_t R);

}  // namespace agp::detail
