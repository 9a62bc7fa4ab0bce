#pragma once

#include <vector>

namespace pa::lp {

enum class Status { Optimal, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
};

/// maximize c.x  subject to  A x <= b, x >= 0, with b >= 0 so the origin is
/// feasible. Dense tableau simplex with Bland's rule; meant for the handful of
/// variables that appear in response-polytope problems.
Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                const std::vector<double>& b, int max_iterations = 10000);

}  // namespace pa::lp
