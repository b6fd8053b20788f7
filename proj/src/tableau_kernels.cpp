#include "flexplan/tableau_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace flexplan::kernels {
namespace {

// Entries smaller than this after an update are flushed to zero so the
// tableau keeps the sparsity of the block structure.
constexpr double kDropTolerance = 1e-14;

inline void scale_pivot_row(double* prow, std::size_t pivot_col,
                            std::span<const std::uint32_t> support) {
  const double inv = 1.0 / prow[pivot_col];
  for (std::uint32_t j : support) prow[j] *= inv;
  prow[pivot_col] = 1.0;
}

inline void eliminate_row(double* row, const double* prow, std::size_t pivot_col,
                          std::span<const std::uint32_t> support) {
  const double f = row[pivot_col];
  if (f == 0.0) return;
  for (std::uint32_t j : support) {
    const double v = row[j] - f * prow[j];
    row[j] = std::abs(v) < kDropTolerance ? 0.0 : v;
  }
  row[pivot_col] = 0.0;
}

}  // namespace

void pivot_serial(std::span<double> tableau, std::size_t cols,
                  std::size_t pivot_row, std::size_t pivot_col,
                  std::span<const std::uint32_t> support) {
  const std::size_t rows = tableau.size() / cols;
  double* base = tableau.data();
  double* prow = base + pivot_row * cols;
  scale_pivot_row(prow, pivot_col, support);
  for (std::size_t i = 0; i < rows; ++i) {
    if (i == pivot_row) continue;
    eliminate_row(base + i * cols, prow, pivot_col, support);
  }
}

void pivot_parallel(std::span<double> tableau, std::size_t cols,
                    std::size_t pivot_row, std::size_t pivot_col,
                    std::span<const std::uint32_t> support) {
  const auto rows = static_cast<std::ptrdiff_t>(tableau.size() / cols);
  double* base = tableau.data();
  double* prow = base + pivot_row * cols;
  scale_pivot_row(prow, pivot_col, support);
  const auto skip = static_cast<std::ptrdiff_t>(pivot_row);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    if (i == skip) continue;
    eliminate_row(base + static_cast<std::size_t>(i) * cols, prow, pivot_col, support);
  }
}

void weighted_row_sum_serial(std::span<const double> tableau, std::size_t cols,
                             std::span<const double> weights, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double* row = tableau.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += w * row[j];
  }
}

void weighted_row_sum_parallel(std::span<const double> tableau, std::size_t cols,
                               std::span<const double> weights, std::span<double> out) {
  // Split by column blocks so each output entry is accumulated by one thread
  // in row order, matching the serial sum exactly.
  constexpr std::ptrdiff_t kBlock = 256;
  const auto ncols = static_cast<std::ptrdiff_t>(cols);
  const std::ptrdiff_t blocks = (ncols + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t lo = b * kBlock;
    const std::ptrdiff_t hi = std::min(ncols, lo + kBlock);
    for (std::ptrdiff_t j = lo; j < hi; ++j) out[static_cast<std::size_t>(j)] = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double w = weights[i];
      if (w == 0.0) continue;
      const double* row = tableau.data() + i * cols;
      for (std::ptrdiff_t j = lo; j < hi; ++j) out[static_cast<std::size_t>(j)] += w * row[j];
    }
  }
}

}  // namespace flexplan::kernels
