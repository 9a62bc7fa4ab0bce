#include "pa/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pa {

std::string to_string(IncentiveMode mode) {
  return mode == IncentiveMode::SingleArm ? "single" : "general";
}

IncentiveMode incentive_mode_from_string(const std::string& text) {
  if (text == "single") return IncentiveMode::SingleArm;
  if (text == "general") return IncentiveMode::General;
  throw std::invalid_argument("unknown incentive mode '" + text + "'");
}

IncentiveVector::IncentiveVector(std::vector<double> values, IncentiveMode mode)
    : values_(std::move(values)), mode_(mode) {
  if (values_.empty()) throw std::invalid_argument("incentive vector must have at least one arm");
  std::size_t nonzero = 0;
  for (double x : values_) {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("incentive coordinates must lie in [0,1]");
    if (x != 0.0) ++nonzero;
  }
  if (mode_ == IncentiveMode::SingleArm && nonzero > 1)
    throw std::invalid_argument("single-arm incentive has more than one nonzero coordinate");
}

IncentiveVector IncentiveVector::zero(std::size_t num_arms, IncentiveMode mode) {
  return IncentiveVector(std::vector<double>(num_arms, 0.0), mode);
}

IncentiveVector IncentiveVector::single(std::size_t num_arms, std::size_t arm, double value) {
  if (arm >= num_arms) throw std::invalid_argument("incentivized arm out of range");
  std::vector<double> values(num_arms, 0.0);
  values[arm] = value;
  return IncentiveVector(std::move(values), IncentiveMode::SingleArm);
}

bool IncentiveVector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

std::size_t IncentiveVector::argmax() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) -
                                  values_.begin());
}

std::size_t IncentiveVector::support_arm() const {
  if (is_zero()) throw std::invalid_argument("zero incentive has no support arm");
  return argmax();
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

GreedyInstance::GreedyInstance(std::vector<double> rewards,
                               std::vector<std::vector<double>> preferences,
                               std::vector<std::vector<std::size_t>> tie_priority,
                               IncentiveMode mode)
    : rewards_(std::move(rewards)),
      preferences_(std::move(preferences)),
      tie_priority_(std::move(tie_priority)),
      mode_(mode) {
  const std::size_t n = rewards_.size();
  if (n == 0) throw std::invalid_argument("instance needs at least one arm");
  if (preferences_.empty()) throw std::invalid_argument("instance needs at least one agent type");
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!std::all_of(rewards_.begin(), rewards_.end(), in_unit))
    throw std::invalid_argument("principal rewards must lie in [0,1]");
  for (const auto& row : preferences_) {
    if (row.size() != n) throw std::invalid_argument("preference row has wrong length");
    if (!std::all_of(row.begin(), row.end(), in_unit))
      throw std::invalid_argument("preferences must lie in [0,1]");
  }
  if (tie_priority_.size() != preferences_.size())
    throw std::invalid_argument("need one tie priority per agent type");
  for (const auto& row : tie_priority_) {
    if (row.size() != n) throw std::invalid_argument("tie priority row has wrong length");
    std::vector<std::size_t> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
      if (sorted[i] != i + 1)
        throw std::invalid_argument("tie priority must be a permutation of 1..N");
  }
}

GreedyInstance GreedyInstance::with_mode(IncentiveMode mode) const {
  GreedyInstance copy = *this;
  copy.mode_ = mode;
  return copy;
}

std::vector<std::vector<std::size_t>> lowest_index_priority(std::size_t num_agents,
                                                            std::size_t num_arms) {
  std::vector<std::size_t> row(num_arms);
  for (std::size_t i = 0; i < num_arms; ++i) row[i] = num_arms - i;
  return std::vector<std::vector<std::size_t>>(num_agents, row);
}

ChosenArm greedy_best_response(const GreedyInstance& instance, std::size_t agent,
                               const IncentiveVector& pi) {
  if (agent >= instance.num_agents()) throw std::invalid_argument("agent index out of range");
  if (pi.size() != instance.num_arms())
    throw std::invalid_argument("incentive dimension does not match instance");
  const auto& mu = instance.preference(agent);
  double best = -1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) best = std::max(best, mu[i] + pi[i]);
  std::size_t chosen = mu.size();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] + pi[i] < best - kTieTolerance) continue;
    if (chosen == mu.size() || instance.priority(agent, i) > instance.priority(agent, chosen))
      chosen = i;
  }
  return ChosenArm{chosen};
}

double utility(const GreedyInstance& instance, const IncentiveVector& pi, ChosenArm chosen) {
  if (chosen.index >= instance.num_arms()) throw std::invalid_argument("chosen arm out of range");
  return instance.reward(chosen.index) - pi[chosen.index];
}

double greedy_utility(const GreedyInstance& instance, const IncentiveVector& pi,
                      std::size_t agent) {
  return utility(instance, pi, greedy_best_response(instance, agent, pi));
}

void require_distribution(std::span<const double> p, double tolerance, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw std::invalid_argument(std::string(what) + " does not sum to one");
}

double expected_greedy_utility(const GreedyInstance& instance, const IncentiveVector& pi,
                               std::span<const double> agent_distribution) {
  if (agent_distribution.size() != instance.num_agents())
    throw std::invalid_argument("agent distribution has wrong length");
  require_distribution(agent_distribution, kDistributionTolerance, "agent distribution");
  double total = 0.0;
  for (std::size_t j = 0; j < instance.num_agents(); ++j) {
    if (agent_distribution[j] == 0.0) continue;
    total += agent_distribution[j] * greedy_utility(instance, pi, j);
  }
  return total;
}

}  // namespace pa
