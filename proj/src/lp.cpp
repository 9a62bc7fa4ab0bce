#include "pa/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pa::lp {

namespace {
constexpr double kPivotEps = 1e-12;
}

Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                const std::vector<double>& b, int max_iterations) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("lp: rhs size mismatch");
  for (std::size_t r = 0; r < m; ++r) {
    if (a[r].size() != n) throw std::invalid_argument("lp: row size mismatch");
    if (b[r] < 0.0) throw std::invalid_argument("lp: origin must be feasible (b >= 0)");
  }

  // Tableau columns: n structural, m slack, then rhs.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) t[r][j] = a[r][j];
    t[r][n + r] = 1.0;
    t[r][width - 1] = b[r];
    basis[r] = n + r;
  }
  // Objective row holds reduced costs as -c.
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  Result result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Bland: entering column is the lowest index with negative reduced cost.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (t[m][j] < -kPivotEps) {
        enter = j;
        break;
      }
    if (enter == width) {
      result.status = Status::Optimal;
      result.x.assign(n, 0.0);
      for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < n) result.x[basis[r]] = t[r][width - 1];
      result.objective = t[m][width - 1];
      return result;
    }
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (t[r][enter] <= kPivotEps) continue;
      const double ratio = t[r][width - 1] / t[r][enter];
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leave < m && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == m) {
      result.status = Status::Unbounded;
      return result;
    }
    const double pivot = t[leave][enter];
    for (double& x : t[leave]) x /= pivot;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = t[r][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[r][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  result.status = Status::IterationLimit;
  return result;
}

}  // namespace pa::lp
