#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pa/core.hpp"

namespace pa {

/// Where a menu item came from. `agent == num_agents` denotes the zero-incentive
/// row of the single-arm construction. `profile` is set for general-incentive
/// items and holds the response profile whose polytope produced the item.
struct MenuProvenance {
  std::optional<std::size_t> arm;
  std::optional<std::size_t> agent;
  bool perturbed = false;
  std::vector<std::size_t> profile;

  friend bool operator==(const MenuProvenance&, const MenuProvenance&) = default;
};

struct MenuItem {
  IncentiveVector incentive;
  MenuProvenance provenance;
};

/// A finite list of incentive vectors, all of the same dimension and mode.
class Menu {
 public:
  /// Items closer than this in l-infinity are duplicates.
  static constexpr double kDedupTolerance = 1e-15;

  Menu() = default;
  Menu(std::size_t num_arms, IncentiveMode mode) : num_arms_(num_arms), mode_(mode) {}

  std::size_t num_arms() const { return num_arms_; }
  IncentiveMode mode() const { return mode_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const MenuItem& operator[](std::size_t i) const { return items_[i]; }
  const IncentiveVector& incentive(std::size_t i) const { return items_[i].incentive; }
  const std::vector<MenuItem>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  /// Appends unless an item within kDedupTolerance exists. Returns true when added.
  bool add(IncentiveVector incentive, MenuProvenance provenance = {});
  /// Appends without the duplicate scan; for constructions unique by design.
  void append_unchecked(IncentiveVector incentive, MenuProvenance provenance = {});

  std::optional<std::size_t> find(const IncentiveVector& incentive) const;

 private:
  void check(const IncentiveVector& incentive) const;

  std::size_t num_arms_ = 0;
  IncentiveMode mode_ = IncentiveMode::SingleArm;
  std::vector<MenuItem> items_;
};

}  // namespace pa
