#pragma once

// Single-arm incentive menus for the greedy model: the raw minimum-cost menu,
// its tie-robust shift, and the response-signature reduction.

#include <cstddef>
#include <vector>

#include "pa/core.hpp"
#include "pa/menu.hpp"

namespace pa {

/// Bit j is set iff agent j best-responds with the incentivized arm.
struct ResponseSignature {
  std::vector<bool> bits;
  friend bool operator==(const ResponseSignature&, const ResponseSignature&) = default;
  friend auto operator<=>(const ResponseSignature&, const ResponseSignature&) = default;
};

/// Zero vector followed by, for every arm i and agent j, the least incentive
/// on i that makes i a maximizer for j (max_k mu^j_k - mu^j_i). Zero-valued
/// items collapse into the zero vector.
Menu build_raw_menu(const GreedyInstance& instance);

/// Smallest gap between distinct values on the same arm (0 included); 1 when
/// no arm has two distinct values.
double menu_value_gap(const Menu& menu);

/// min(gap/2, 1/(2T)).
double perturbation_epsilon(const Menu& menu, std::size_t horizon);

/// Adds, for every arm and every value w on that arm (0 included), the shifted
/// item w + eps_T. Shifted items above 1 are dropped.
Menu perturb_menu(const GreedyInstance& instance, const Menu& menu, std::size_t horizon);

/// Throws std::invalid_argument for the zero vector or a general incentive.
ResponseSignature response_signature(const GreedyInstance& instance, const IncentiveVector& pi);

/// Keeps the zero vector and, per signature, the item maximizing
/// v_a - pi_a for the incentivized arm a (ties: lowest arm, then lowest value).
/// Output order: zero first, then by (arm, value).
Menu reduce_menu(const GreedyInstance& instance, const Menu& menu);

/// raw -> perturb(T) -> reduce.
Menu build_single_arm_menu(const GreedyInstance& instance, std::size_t horizon);

}  // namespace pa
