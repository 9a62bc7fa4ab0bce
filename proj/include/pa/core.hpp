#pragma once

// Domain types for the repeated principal-agent problem: incentive vectors,
// greedy agent instances, and the deterministic greedy best response.
//
// Arms and agent types are 0-based throughout the library. Documents on disk
// use 1-based tie priorities (see io.hpp).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pa {

/// Absolute tolerance under which two agent scores are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Tolerance for "sums to one" checks on agent distributions.
inline constexpr double kDistributionTolerance = 1e-12;

enum class IncentiveMode { SingleArm, General };

std::string to_string(IncentiveMode mode);
IncentiveMode incentive_mode_from_string(const std::string& text);

/// The principal's action: a vector in [0,1]^N. In SingleArm mode at most one
/// coordinate may be nonzero. Construction validates both invariants.
class IncentiveVector {
 public:
  IncentiveVector() = default;
  IncentiveVector(std::vector<double> values, IncentiveMode mode);

  static IncentiveVector zero(std::size_t num_arms,
                              IncentiveMode mode = IncentiveMode::SingleArm);
  /// Single-arm vector with `value` on `arm` (the zero vector when value == 0).
  static IncentiveVector single(std::size_t num_arms, std::size_t arm, double value);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  IncentiveMode mode() const { return mode_; }

  bool is_zero() const;
  /// Index of the largest coordinate; the lowest index among equal maxima.
  std::size_t argmax() const;
  /// For nonzero single-arm vectors, the incentivized arm.
  std::size_t support_arm() const;

  friend bool operator==(const IncentiveVector&, const IncentiveVector&) = default;

 private:
  std::vector<double> values_;
  IncentiveMode mode_ = IncentiveMode::SingleArm;
};

double linf_distance(std::span<const double> a, std::span<const double> b);

/// The arm an agent ends up playing.
struct ChosenArm {
  std::size_t index = 0;
  friend bool operator==(const ChosenArm&, const ChosenArm&) = default;
};

/// Principal rewards v, agent preferences mu (K rows of N), and per-agent tie
/// priorities. `tie_priority[j][i]` is the rank of arm i for agent j, a value
/// in 1..N; among tied arms the highest rank wins.
class GreedyInstance {
 public:
  GreedyInstance() = default;
  GreedyInstance(std::vector<double> rewards,
                 std::vector<std::vector<double>> preferences,
                 std::vector<std::vector<std::size_t>> tie_priority,
                 IncentiveMode mode = IncentiveMode::SingleArm);

  std::size_t num_arms() const { return rewards_.size(); }
  std::size_t num_agents() const { return preferences_.size(); }
  IncentiveMode mode() const { return mode_; }

  const std::vector<double>& rewards() const { return rewards_; }
  double reward(std::size_t arm) const { return rewards_[arm]; }
  const std::vector<std::vector<double>>& preferences() const { return preferences_; }
  const std::vector<double>& preference(std::size_t agent) const { return preferences_[agent]; }
  const std::vector<std::vector<std::size_t>>& tie_priority() const { return tie_priority_; }
  std::size_t priority(std::size_t agent, std::size_t arm) const {
    return tie_priority_[agent][arm];
  }

  GreedyInstance with_mode(IncentiveMode mode) const;

  friend bool operator==(const GreedyInstance&, const GreedyInstance&) = default;

 private:
  std::vector<double> rewards_;
  std::vector<std::vector<double>> preferences_;
  std::vector<std::vector<std::size_t>> tie_priority_;
  IncentiveMode mode_ = IncentiveMode::SingleArm;
};

/// Priorities under which the lowest arm index wins every tie.
std::vector<std::vector<std::size_t>> lowest_index_priority(std::size_t num_agents,
                                                            std::size_t num_arms);

/// argmax_i (mu^agent_i + pi_i); ties within kTieTolerance go to the arm with
/// the highest tie priority for that agent.
ChosenArm greedy_best_response(const GreedyInstance& instance, std::size_t agent,
                               const IncentiveVector& pi);

/// v_chosen - pi_chosen. Incentives on arms the agent did not pick are not paid.
double utility(const GreedyInstance& instance, const IncentiveVector& pi, ChosenArm chosen);

/// Utility of pi against agent type `agent` under the greedy model.
double greedy_utility(const GreedyInstance& instance, const IncentiveVector& pi,
                      std::size_t agent);

/// sum_j p_j U(pi, j). Throws std::invalid_argument for an invalid distribution.
double expected_greedy_utility(const GreedyInstance& instance, const IncentiveVector& pi,
                               std::span<const double> agent_distribution);

/// Throws std::invalid_argument unless `p` is nonnegative and sums to one
/// within `tolerance`.
void require_distribution(std::span<const double> p, double tolerance,
                          const char* what = "distribution");

}  // namespace pa
