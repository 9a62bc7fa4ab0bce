#pragma once

// General incentives under the greedy model. [0,1]^N splits into the regions
// P_sigma on which every agent's best response is fixed; the menu holds one
// strictly-interior point near each vertex of each nonempty region.

#include <cstddef>
#include <optional>
#include <vector>

#include "pa/core.hpp"
#include "pa/menu.hpp"

namespace pa {

/// sigma[j] is the arm agent j plays.
using ResponseProfile = std::vector<std::size_t>;

/// normal . x <= offset
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
};

/// Closure of P_sigma: 2N box rows (-x_i <= 0, x_i <= 1) followed by the
/// K(N-1) preference rows pi_i - pi_sigma_j <= mu^j_sigma_j - mu^j_i.
struct ResponsePolytope {
  ResponseProfile profile;
  std::size_t num_arms = 0;
  std::vector<Halfspace> halfspaces;

  std::size_t num_box() const { return 2 * num_arms; }
};

struct GeneralCaps {
  std::size_t max_profiles = 1'000'000;  // bound on N^K
  std::size_t max_arms = 6;              // vertex enumeration is exponential in N
};

inline constexpr double kStrictSlack = 1e-9;
inline constexpr double kInteriorSlack = 1e-10;
inline constexpr double kVertexFeasibility = 1e-9;
inline constexpr double kVertexDedup = 1e-7;
inline constexpr double kMaxCondition = 1e10;

ResponsePolytope make_polytope(const GreedyInstance& instance, const ResponseProfile& profile);

/// Smallest slack over the preference rows (box rows are not strict).
/// Positive iff x is in the open region, given x is inside the box.
double preference_slack(const ResponsePolytope& polytope, const std::vector<double>& x);

struct SlackPoint {
  std::vector<double> point;
  double slack = 0.0;
};

/// Maximizes s subject to every preference row tightened by s, inside the
/// box, with s capped at 1.
SlackPoint max_slack_point(const ResponsePolytope& polytope);

/// Profiles with a nonempty open region, in lexicographic order.
/// Throws std::length_error when N^K exceeds caps.max_profiles.
std::vector<ResponseProfile> enumerate_profiles(const GreedyInstance& instance,
                                                const GeneralCaps& caps = {});

struct VertexSet {
  std::vector<std::vector<double>> points;  // sorted lexicographically
  std::size_t skipped_degenerate = 0;       // ill-conditioned active sets
};

/// Vertices of the closed region from all N-subsets of distinct rows.
VertexSet polytope_vertices(const ResponsePolytope& polytope, const GeneralCaps& caps = {});

/// A point of the open region within eps of vertex (l-infinity).
std::vector<double> interior_shift(const ResponsePolytope& polytope,
                                   const std::vector<double>& vertex, double eps);

/// Union over feasible profiles of the shifted vertices, eps = 1/T.
Menu build_general_menu(const GreedyInstance& instance, std::size_t horizon,
                        const GeneralCaps& caps = {});

}  // namespace pa
