#pragma once

// Generators for the structured problem families (two-type example, the two
// greedy lower-bound constructions, the smooth lower-bound suite), random
// instances, and arrival processes.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pa/core.hpp"
#include "pa/menu.hpp"
#include "pa/rng.hpp"
#include "pa/smooth.hpp"

namespace pa {

/// One round as the arrival process may see it: what was offered and what
/// was played. Agent types are never recorded here.
struct RoundTrace {
  std::size_t incentive_index = 0;
  std::size_t arm = 0;
};

/// Produces j_t. Oblivious kinds ignore the history.
class ArrivalProcess {
 public:
  enum class Kind { FixedSequence, IID, BlockSwitching, Adaptive };
  using Callback = std::function<std::size_t(std::span<const RoundTrace>)>;

  static ArrivalProcess fixed(std::vector<std::size_t> sequence);
  static ArrivalProcess iid(std::vector<double> probabilities);
  /// (length, agent) blocks repeated cyclically.
  static ArrivalProcess blocks(std::vector<std::pair<std::size_t, std::size_t>> schedule);
  static ArrivalProcess adaptive(std::size_t num_agents, Callback callback);

  Kind kind() const { return kind_; }
  const std::vector<std::size_t>& sequence() const { return sequence_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& schedule() const { return schedule_; }
  /// Largest agent index the process can emit, plus one.
  std::size_t num_agents() const { return num_agents_; }

  /// Agent for round t (0-based). `rng` is the arrivals stream.
  std::size_t next(std::size_t t, RandomStream& rng, std::span<const RoundTrace> history) const;

  /// Throws unless every index the process can emit is below num_agents.
  void validate_for(std::size_t num_agents) const;

 private:
  Kind kind_ = Kind::FixedSequence;
  std::vector<std::size_t> sequence_;
  std::vector<double> probabilities_;
  std::vector<std::pair<std::size_t, std::size_t>> schedule_;
  std::size_t schedule_period_ = 0;
  Callback callback_;
  std::size_t num_agents_ = 0;
};

// ---- two-type example ------------------------------------------------------------

struct Example32 {
  GreedyInstance instance;
  ArrivalProcess arrivals;
  double delta = 0.0;
};

/// delta in [0.7, 0.71].
Example32 example_3_2(double delta);

// ---- sqrt(KT) hard family -----------------------------------------------------

struct HardB1 {
  GreedyInstance instance;
  std::vector<double> p;                     // base distribution over K types
  std::vector<std::vector<double>> p_prime;  // p_prime[z-2] for target z = 2..K-1 (1-based)
  Menu menu;                                 // pi_1 = 0, pi_i = (0, 2/3 - beta_i, 0, ...)
  std::vector<double> beta;                  // beta[i-2] for i = 2..K-1
  double eps = 0.0;
  double gap = 0.0;  // eps / 6
  std::size_t horizon = 0;

  /// r_i under p (analytic), i = 1..K-1 as index 0..K-2.
  std::vector<double> analytic_rewards() const;
  /// r'_i under p'(z), z 1-based in 2..K-1.
  std::vector<double> analytic_rewards_perturbed(std::size_t z) const;
};

/// K >= 3, N >= 3, T > max(4(K-2)^3, 10(K-2)); eps = sqrt((K-2)/(10T)).
HardB1 hard_b1(std::size_t num_agents, std::size_t num_arms, std::size_t horizon);

/// Same construction with eps given directly; checks only the structural
/// conditions the construction needs (eps < 1/10, p' valid, incentives on
/// arm 1 unprofitable). horizon is recorded, not checked.
HardB1 hard_b1_with_epsilon(std::size_t num_agents, std::size_t num_arms, double eps,
                            std::size_t horizon = 0);

// ---- combinatorial hard family ------------------------------------------------

struct HardB2 {
  GreedyInstance instance;
  std::size_t k0 = 0;          // K - 2
  std::size_t blocks = 0;      // M
  std::size_t block_size = 0;  // K0 / M
  std::size_t n0 = 0;          // (K0/M)^M + 1
  std::vector<std::size_t> offsets;    // d_i = (i-1) K0/M
  std::vector<std::vector<int>> x_set;  // X in f order: x_set[a] = f^{-1}(a)
  Menu menu;                            // pi^z = 1/T on arm f(z), z in X
  double eps = 0.0;
  std::size_t horizon = 0;

  /// f(x) as a 0-based arm; block 1 is the most significant digit.
  std::size_t f(const std::vector<int>& x) const;
  /// p(x, .) over the K agent types; x may have at most one 1 per block.
  std::vector<double> distribution(const std::vector<int>& x) const;
  /// 1/8 + M/(4K0) + (eps/2M) |x & z|.
  double analytic_reward(const std::vector<int>& x, const std::vector<int>& z) const;
};

/// K >= 6 with K0 = K-2, N - 1 = K0^M for an integer M >= 1 dividing K0.
/// eps defaults to sqrt(M K0 / T) / 5 when not given (<= 0).
HardB2 hard_b2(std::size_t num_agents, std::size_t num_arms, std::size_t horizon, double eps = 0.0);

// ---- smooth lower-bound suite ----------------------------------------------------

/// (L-1)^{-2/3} N^{1/3} T^{-1/3}.
double smooth_hard_epsilon(std::size_t num_arms, double lipschitz, std::size_t horizon);

struct SmoothHardMember {
  SmoothHardInstanceParams params;
  SmoothChoiceModel model;
  ArrivalProcess arrivals;  // constant single type
};

/// One member per type (i, j): i in [N-1], j in [floor(1/(2 eps))].
std::vector<SmoothHardMember> smooth_hard_suite(std::size_t num_arms, double lipschitz,
                                                std::size_t horizon);

// ---- random instances -------------------------------------------------------------

/// Uniform v and mu on a 1/1000 lattice, random tie priorities.
GreedyInstance random_greedy_instance(std::size_t num_arms, std::size_t num_agents,
                                      RandomStream& rng,
                                      IncentiveMode mode = IncentiveMode::SingleArm);

}  // namespace pa
