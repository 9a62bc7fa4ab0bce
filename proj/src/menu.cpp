#include "pa/menu.hpp"

#include <stdexcept>

namespace pa {

void Menu::check(const IncentiveVector& incentive) const {
  if (incentive.size() != num_arms_) throw std::invalid_argument("menu item has wrong dimension");
  if (mode_ == IncentiveMode::SingleArm && incentive.mode() != IncentiveMode::SingleArm)
    throw std::invalid_argument("single-arm menu cannot hold a general incentive");
}

std::optional<std::size_t> Menu::find(const IncentiveVector& incentive) const {
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (linf_distance(items_[i].incentive.values(), incentive.values()) <= kDedupTolerance)
      return i;
  return std::nullopt;
}

bool Menu::add(IncentiveVector incentive, MenuProvenance provenance) {
  check(incentive);
  if (find(incentive)) return false;
  items_.push_back(MenuItem{std::move(incentive), std::move(provenance)});
  return true;
}

void Menu::append_unchecked(IncentiveVector incentive, MenuProvenance provenance) {
  check(incentive);
  items_.push_back(MenuItem{std::move(incentive), std::move(provenance)});
}

}  // namespace pa
