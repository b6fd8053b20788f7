#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "flexplan/milp.hpp"

// Dense tableau kernels used by the simplex. Each kernel has a serial
// reference and an OpenMP version; both touch the same entries in the same
// per-row order, so their results are bitwise identical.
namespace flexplan::kernels {

// Gauss-Jordan pivot on a row-major tableau with `cols` columns: scales the
// pivot row to 1 at `pivot_col` and clears that column from every other row.
// Only the columns in `support` (the nonzeros of the pivot row, including
// `pivot_col`) are touched.
void pivot_serial(std::span<double> tableau, std::size_t cols,
                  std::size_t pivot_row, std::size_t pivot_col,
                  std::span<const std::uint32_t> support);
void pivot_parallel(std::span<double> tableau, std::size_t cols,
                    std::size_t pivot_row, std::size_t pivot_col,
                    std::span<const std::uint32_t> support);

// out[j] = sum_i weights[i] * tableau[i][j], skipping zero weights.
void weighted_row_sum_serial(std::span<const double> tableau, std::size_t cols,
                             std::span<const double> weights, std::span<double> out);
void weighted_row_sum_parallel(std::span<const double> tableau, std::size_t cols,
                               std::span<const double> weights, std::span<double> out);

inline void pivot(KernelMode mode, std::span<double> tableau, std::size_t cols,
                  std::size_t pivot_row, std::size_t pivot_col,
                  std::span<const std::uint32_t> support) {
  if (mode == KernelMode::kParallel) {
    pivot_parallel(tableau, cols, pivot_row, pivot_col, support);
  } else {
    pivot_serial(tableau, cols, pivot_row, pivot_col, support);
  }
}

inline void weighted_row_sum(KernelMode mode, std::span<const double> tableau,
                             std::size_t cols, std::span<const double> weights,
                             std::span<double> out) {
  if (mode == KernelMode::kParallel) {
    weighted_row_sum_parallel(tableau, cols, weights, out);
  } else {
    weighted_row_sum_serial(tableau, cols, weights, out);
  }
}

}  // namespace flexplan::kernels
