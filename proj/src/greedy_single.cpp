#include "pa/greedy_single.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace pa {

namespace {

void require_single_arm(const Menu& menu) {
  if (menu.mode() != IncentiveMode::SingleArm)
    throw std::invalid_argument("expected a single-arm menu");
}

// Values per arm, 0 included, sorted ascending and unique.
std::vector<std::vector<double>> values_per_arm(const Menu& menu) {
  std::vector<std::vector<double>> values(menu.num_arms(), std::vector<double>{0.0});
  for (const auto& item : menu) {
    if (item.incentive.is_zero()) continue;
    const std::size_t arm = item.incentive.support_arm();
    values[arm].push_back(item.incentive[arm]);
  }
  for (auto& v : values) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return values;
}

}  // namespace

Menu build_raw_menu(const GreedyInstance& instance) {
  const std::size_t n = instance.num_arms();
  const std::size_t k = instance.num_agents();
  Menu menu(n, IncentiveMode::SingleArm);
  menu.append_unchecked(IncentiveVector::zero(n), MenuProvenance{std::nullopt, k, false, {}});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& mu = instance.preference(j);
      const double best = *std::max_element(mu.begin(), mu.end());
      const double cost = best - mu[i];
      if (cost <= 0.0) continue;  // zero vector already present
      menu.add(IncentiveVector::single(n, i, cost), MenuProvenance{i, j, false, {}});
    }
  }
  return menu;
}

double menu_value_gap(const Menu& menu) {
  require_single_arm(menu);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& values : values_per_arm(menu))
    for (std::size_t s = 1; s < values.size(); ++s) gap = std::min(gap, values[s] - values[s - 1]);
  return std::isinf(gap) ? 1.0 : gap;
}

double perturbation_epsilon(const Menu& menu, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  return std::min(menu_value_gap(menu) / 2.0, 1.0 / (2.0 * static_cast<double>(horizon)));
}

Menu perturb_menu(const GreedyInstance& instance, const Menu& menu, std::size_t horizon) {
  require_single_arm(menu);
  if (menu.num_arms() != instance.num_arms())
    throw std::invalid_argument("menu dimension does not match instance");
  const double eps = perturbation_epsilon(menu, horizon);
  Menu out = menu;
  const auto values = values_per_arm(menu);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (double w : values[i]) {
      const double shifted = w + eps;
      if (shifted > 1.0) continue;
      out.add(IncentiveVector::single(menu.num_arms(), i, shifted),
              MenuProvenance{i, std::nullopt, true, {}});
    }
  }
  return out;
}

ResponseSignature response_signature(const GreedyInstance& instance, const IncentiveVector& pi) {
  if (pi.mode() != IncentiveMode::SingleArm)
    throw std::invalid_argument("response signature needs a single-arm incentive");
  if (pi.is_zero()) throw std::invalid_argument("response signature is undefined at zero");
  const std::size_t arm = pi.support_arm();
  ResponseSignature sig;
  sig.bits.resize(instance.num_agents());
  for (std::size_t j = 0; j < instance.num_agents(); ++j)
    sig.bits[j] = greedy_best_response(instance, j, pi).index == arm;
  return sig;
}

Menu reduce_menu(const GreedyInstance& instance, const Menu& menu) {
  require_single_arm(menu);
  struct Best {
    const MenuItem* item;
    double net;
    std::size_t arm;
    double value;
  };
  std::map<ResponseSignature, Best> groups;
  const MenuItem* zero_item = nullptr;
  for (const auto& item : menu) {
    if (item.incentive.is_zero()) {
      if (!zero_item) zero_item = &item;
      continue;
    }
    const std::size_t arm = item.incentive.support_arm();
    const double value = item.incentive[arm];
    const Best candidate{&item, instance.reward(arm) - value, arm, value};
    auto [it, inserted] = groups.try_emplace(response_signature(instance, item.incentive), candidate);
    if (inserted) continue;
    Best& b = it->second;
    if (candidate.net > b.net ||
        (candidate.net == b.net &&
         std::tie(candidate.arm, candidate.value) < std::tie(b.arm, b.value)))
      b = candidate;
  }

  std::vector<const MenuItem*> kept;
  kept.reserve(groups.size());
  for (const auto& [sig, b] : groups) kept.push_back(b.item);
  std::sort(kept.begin(), kept.end(), [](const MenuItem* a, const MenuItem* b) {
    const std::size_t ia = a->incentive.support_arm();
    const std::size_t ib = b->incentive.support_arm();
    return std::pair(ia, a->incentive[ia]) < std::pair(ib, b->incentive[ib]);
  });

  Menu out(menu.num_arms(), IncentiveMode::SingleArm);
  if (zero_item)
    out.append_unchecked(zero_item->incentive, zero_item->provenance);
  else
    out.append_unchecked(IncentiveVector::zero(menu.num_arms()),
                         MenuProvenance{std::nullopt, instance.num_agents(), false, {}});
  for (const MenuItem* item : kept) out.append_unchecked(item->incentive, item->provenance);
  return out;
}

Menu build_single_arm_menu(const GreedyInstance& instance, std::size_t horizon) {
  return reduce_menu(instance, perturb_menu(instance, build_raw_menu(instance), horizon));
}

}  // namespace pa
