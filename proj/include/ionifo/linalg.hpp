#pragma once

#include <cmath>
#include <vector>

#include "ionifo/errors.hpp"

// Dense linear solve by Gaussian elimination with partial pivoting.
// The systems here are tiny (7x7 and 9x9 trajectory designs), so a
// straightforward O(n^3) elimination is the right tool.

namespace ionifo {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) {
    throw domain_error("solve_linear: matrix/vector sizes do not conform");
  }
  double norm = 0.0;
  for (const auto& row : a) {
    if (row.size() != n) throw domain_error("solve_linear: matrix is not square");
    for (double v : row) norm = std::max(norm, std::abs(v));
  }
  const double pivot_floor = 1e-14 * norm;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= pivot_floor) {
      throw singular_system_error("solve_linear: pivot below threshold");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace ionifo
