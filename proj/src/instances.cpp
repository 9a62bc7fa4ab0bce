#include "pa/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pa {

// ---- arrivals -------------------------------------------------------------------

ArrivalProcess ArrivalProcess::fixed(std::vector<std::size_t> sequence) {
  if (sequence.empty()) throw std::invalid_argument("fixed arrival sequence is empty");
  ArrivalProcess a;
  a.kind_ = Kind::FixedSequence;
  a.num_agents_ = *std::max_element(sequence.begin(), sequence.end()) + 1;
  a.sequence_ = std::move(sequence);
  return a;
}

ArrivalProcess ArrivalProcess::iid(std::vector<double> probabilities) {
  if (probabilities.empty()) throw std::invalid_argument("arrival distribution is empty");
  require_distribution(probabilities, kDistributionTolerance, "arrival distribution");
  ArrivalProcess a;
  a.kind_ = Kind::IID;
  a.num_agents_ = probabilities.size();
  a.probabilities_ = std::move(probabilities);
  return a;
}

ArrivalProcess ArrivalProcess::blocks(std::vector<std::pair<std::size_t, std::size_t>> schedule) {
  ArrivalProcess a;
  a.kind_ = Kind::BlockSwitching;
  for (const auto& [length, agent] : schedule) {
    a.schedule_period_ += length;
    a.num_agents_ = std::max(a.num_agents_, agent + 1);
  }
  if (a.schedule_period_ == 0) throw std::invalid_argument("block schedule has zero length");
  a.schedule_ = std::move(schedule);
  return a;
}

ArrivalProcess ArrivalProcess::adaptive(std::size_t num_agents, Callback callback) {
  if (!callback) throw std::invalid_argument("adaptive arrivals need a callback");
  ArrivalProcess a;
  a.kind_ = Kind::Adaptive;
  a.num_agents_ = num_agents;
  a.callback_ = std::move(callback);
  return a;
}

std::size_t ArrivalProcess::next(std::size_t t, RandomStream& rng,
                                 std::span<const RoundTrace> history) const {
  switch (kind_) {
    case Kind::FixedSequence:
      return sequence_[t % sequence_.size()];
    case Kind::IID:
      return rng.categorical(probabilities_);
    case Kind::BlockSwitching: {
      std::size_t pos = t % schedule_period_;
      for (const auto& [length, agent] : schedule_) {
        if (pos < length) return agent;
        pos -= length;
      }
      return schedule_.back().second;
    }
    case Kind::Adaptive: {
      const std::size_t j = callback_(history);
      if (j >= num_agents_) throw std::out_of_range("adaptive adversary produced an invalid agent");
      return j;
    }
  }
  return 0;
}

void ArrivalProcess::validate_for(std::size_t num_agents) const {
  if (num_agents_ > num_agents)
    throw std::invalid_argument("arrival process refers to agent types the instance lacks");
}

// ---- two-type example ---------------------------------------------------------------

Example32 example_3_2(double delta) {
  if (!(delta >= 0.7 && delta <= 0.71)) throw std::invalid_argument("delta must lie in [0.7, 0.71]");
  // Agent 1 breaks the arm-1/arm-3 tie toward arm 1; agent 2 the arm-1/arm-2 tie toward arm 2.
  GreedyInstance instance({1.0, 0.5, 0.0}, {{0.2, 0.0, 0.2 + delta}, {0.2, 0.2 + delta, 0.0}},
                          {{3, 1, 2}, {2, 3, 1}});
  return Example32{std::move(instance), ArrivalProcess::iid({0.4, 0.6}), delta};
}

// ---- sqrt(KT) hard family -----------------------------------------------------------

namespace {

double b1_beta(std::size_t i, std::size_t k) {
  const double km2 = static_cast<double>(k - 2);
  return 1.0 / (3.0 * (5.0 / 6.0 - static_cast<double>(i - 2) / (3.0 * km2))) - 1.0 / 3.0;
}

double b1_shift(std::size_t z, std::size_t k, double eps) {
  return eps * (5.0 / 6.0 - static_cast<double>(z - 2) / (3.0 * static_cast<double>(k - 2)));
}

std::vector<double> b1_rewards(const HardB1& h, const std::vector<double>& p) {
  const std::size_t k = h.instance.num_agents();
  std::vector<double> r(k - 1);
  r[0] = h.instance.reward(0) * p[0];
  double reach = 1.0 - p[k - 1];  // mass of agents that switch to arm 2 under pi_i
  for (std::size_t i = 2; i <= k - 1; ++i) {
    if (i > 2) reach -= p[i - 2];  // agent i-1 (1-based) no longer switches
    r[i - 1] = reach * (1.0 / 3.0 + h.beta[i - 2]);
  }
  return r;
}

}  // namespace

std::vector<double> HardB1::analytic_rewards() const { return b1_rewards(*this, p); }

std::vector<double> HardB1::analytic_rewards_perturbed(std::size_t z) const {
  const std::size_t k = instance.num_agents();
  if (z < 2 || z > k - 1) throw std::invalid_argument("perturbation target must lie in 2..K-1");
  return b1_rewards(*this, p_prime[z - 2]);
}

HardB1 hard_b1_with_epsilon(std::size_t k, std::size_t n, double eps, std::size_t horizon) {
  if (k < 3 || n < 3) throw std::invalid_argument("hard_b1 needs K >= 3 and N >= 3");
  if (!(eps > 0.0 && eps < 0.1)) throw std::invalid_argument("hard_b1 needs 0 < eps < 1/10");
  const double km2 = static_cast<double>(k - 2);
  if (!(1.0 / (3.0 * km2) - 5.0 * eps / 6.0 > 0.0))
    throw std::invalid_argument("hard_b1: eps too large for a valid perturbed distribution");
  if (!((2.0 + eps) / 3.0 - (1.0 - b1_beta(k - 1, k)) < 0.0))
    throw std::invalid_argument("hard_b1: eps too large; incentives on arm 1 become profitable");

  HardB1 h;
  h.eps = eps;
  h.gap = eps / 6.0;
  h.horizon = horizon;
  for (std::size_t i = 2; i <= k - 1; ++i) h.beta.push_back(b1_beta(i, k));

  std::vector<double> v(n, 0.0);
  v[0] = 2.0 / 3.0 + eps / 3.0;
  v[1] = 1.0;
  std::vector<std::vector<double>> mu(k, std::vector<double>(n, 0.0));
  mu[0][0] = 1.0 / 3.0;
  for (std::size_t i = 2; i <= k - 1; ++i) {
    mu[i - 1][1] = 1.0 / 3.0;
    mu[i - 1][2] = 1.0 - h.beta[i - 2];
  }
  mu[k - 1][2] = 1.0;
  h.instance = GreedyInstance(std::move(v), std::move(mu), lowest_index_priority(k, n));

  h.p.assign(k, 1.0 / (3.0 * km2));
  h.p[0] = 0.5;
  h.p[k - 1] = 1.0 / 6.0;
  require_distribution(h.p, 1e-12, "hard_b1 base distribution");
  for (std::size_t z = 2; z <= k - 1; ++z) {
    std::vector<double> q = h.p;
    const double l = b1_shift(z, k, eps);
    if (z >= 3) {
      q[z - 2] -= l;  // type z-1
      q[z - 1] += l;  // type z
    } else {
      q[1] += l;
      q[k - 1] -= l;
    }
    require_distribution(q, 1e-12, "hard_b1 perturbed distribution");
    h.p_prime.push_back(std::move(q));
  }

  h.menu = Menu(n, IncentiveMode::SingleArm);
  h.menu.append_unchecked(IncentiveVector::zero(n), MenuProvenance{std::nullopt, 0, false, {}});
  for (std::size_t i = 2; i <= k - 1; ++i)
    h.menu.append_unchecked(IncentiveVector::single(n, 1, 2.0 / 3.0 - h.beta[i - 2]),
                            MenuProvenance{1, i - 1, false, {}});
  return h;
}

HardB1 hard_b1(std::size_t k, std::size_t n, std::size_t horizon) {
  if (k < 3 || n < 3) throw std::invalid_argument("hard_b1 needs K >= 3 and N >= 3");
  const double km2 = static_cast<double>(k - 2);
  const double t = static_cast<double>(horizon);
  if (!(t > 4.0 * km2 * km2 * km2 && t > 10.0 * km2))
    throw std::invalid_argument("hard_b1 needs T > max(4(K-2)^3, 10(K-2))");
  return hard_b1_with_epsilon(k, n, std::sqrt(km2 / (10.0 * t)), horizon);
}

// ---- combinatorial hard family ------------------------------------------------------

std::size_t HardB2::f(const std::vector<int>& x) const {
  if (x.size() != k0) throw std::invalid_argument("x has wrong length");
  std::size_t code = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t digit = block_size;
    for (std::size_t s = 0; s < block_size; ++s) {
      if (x[offsets[b] + s] == 0) continue;
      if (digit != block_size) throw std::invalid_argument("x has two ones in a block");
      digit = s;
    }
    if (digit == block_size) throw std::invalid_argument("x has an empty block");
    code = code * block_size + digit;
  }
  return code;
}

std::vector<double> HardB2::distribution(const std::vector<int>& x) const {
  if (x.size() != k0) throw std::invalid_argument("x has wrong length");
  const double m = static_cast<double>(blocks);
  std::vector<double> p(k0 + 2);
  double ones = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    int in_block = 0;
    for (std::size_t s = 0; s < block_size; ++s) in_block += x[offsets[b] + s] != 0;
    if (in_block > 1) throw std::invalid_argument("x has two ones in a block");
  }
  for (std::size_t j = 0; j < k0; ++j) {
    p[j] = 1.0 / (2.0 * static_cast<double>(k0)) + (x[j] != 0 ? eps / m : 0.0);
    ones += x[j] != 0;
  }
  p[k0] = 0.25;
  p[k0 + 1] = 0.25 - eps / m * ones;
  require_distribution(p, 1e-12, "hard_b2 distribution");
  return p;
}

double HardB2::analytic_reward(const std::vector<int>& x, const std::vector<int>& z) const {
  double overlap = 0.0;
  for (std::size_t j = 0; j < k0; ++j) overlap += (x[j] != 0 && z[j] != 0);
  const double m = static_cast<double>(blocks);
  return 0.125 + m / (4.0 * static_cast<double>(k0)) + eps / (2.0 * m) * overlap;
}

HardB2 hard_b2(std::size_t k, std::size_t n, std::size_t horizon, double eps) {
  if (k < 6) throw std::invalid_argument("hard_b2 needs K >= 6");
  if (horizon < 2) throw std::invalid_argument("hard_b2 needs T >= 2");
  HardB2 h;
  h.k0 = k - 2;
  // N - 1 must be an exact power of K0.
  std::size_t power = 1, m = 0;
  while (power < n - 1) {
    power *= h.k0;
    ++m;
  }
  if (n < 2 || power != n - 1 || m == 0)
    throw std::invalid_argument("hard_b2 needs N - 1 to be a positive integer power of K - 2");
  if (h.k0 % m != 0) throw std::invalid_argument("hard_b2 needs M to divide K - 2");
  h.blocks = m;
  h.block_size = h.k0 / m;
  std::size_t x_count = 1;
  for (std::size_t b = 0; b < m; ++b) x_count *= h.block_size;
  h.n0 = x_count + 1;
  if (h.n0 > n) throw std::logic_error("hard_b2: N0 exceeds N");
  for (std::size_t b = 0; b < m; ++b) h.offsets.push_back(b * h.block_size);
  h.horizon = horizon;
  const double t = static_cast<double>(horizon);
  h.eps = eps > 0.0 ? eps : std::sqrt(static_cast<double>(m * h.k0) / t) / 5.0;
  if (!(0.25 - h.eps >= 0.0)) throw std::invalid_argument("hard_b2: eps too large");

  for (std::size_t code = 0; code < x_count; ++code) {
    std::vector<int> x(h.k0, 0);
    std::size_t rest = code;
    for (std::size_t b = m; b-- > 0;) {
      x[h.offsets[b] + rest % h.block_size] = 1;
      rest /= h.block_size;
    }
    h.x_set.push_back(std::move(x));
  }

  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i + 1 < h.n0; ++i) v[i] = 0.5 + 1.0 / t;
  std::vector<std::vector<double>> mu(k, std::vector<double>(n, 0.0));
  const std::size_t special = h.n0 - 1;  // arm N0 in 1-based terms
  for (std::size_t j = 0; j < h.k0; ++j) {
    for (std::size_t a = 0; a < x_count; ++a)
      if (h.x_set[a][j]) mu[j][a] = 1.0 - 1.0 / t;
    mu[j][special] = 1.0;
  }
  mu[k - 2][special] = 1.0 / t;
  mu[k - 1][special] = 1.0;
  // Lowest index wins, which ranks every arm of [N0-1] above arm N0.
  h.instance = GreedyInstance(std::move(v), std::move(mu), lowest_index_priority(k, n));

  h.menu = Menu(n, IncentiveMode::SingleArm);
  for (std::size_t a = 0; a < x_count; ++a)
    h.menu.append_unchecked(IncentiveVector::single(n, a, 1.0 / t),
                            MenuProvenance{a, std::nullopt, false, {}});
  return h;
}

// ---- smooth suite -----------------------------------------------------------------------

double smooth_hard_epsilon(std::size_t num_arms, double lipschitz, std::size_t horizon) {
  if (lipschitz < 3.0 || num_arms < 2 || horizon == 0)
    throw std::invalid_argument("smooth hard suite needs L >= 3, N >= 2, T >= 1");
  return std::pow(lipschitz - 1.0, -2.0 / 3.0) * std::cbrt(static_cast<double>(num_arms)) *
         std::pow(static_cast<double>(horizon), -1.0 / 3.0);
}

std::vector<SmoothHardMember> smooth_hard_suite(std::size_t num_arms, double lipschitz,
                                                std::size_t horizon) {
  const double eps = smooth_hard_epsilon(num_arms, lipschitz, horizon);
  const auto intervals = static_cast<std::size_t>(std::floor(0.5 / eps + 1e-12));
  if (intervals == 0) throw std::invalid_argument("resolution too coarse for [0, 1/2]");
  std::vector<SmoothHardMember> suite;
  for (std::size_t i = 0; i + 1 < num_arms; ++i)
    for (std::size_t j = 0; j < intervals; ++j) {
      SmoothHardInstanceParams params{i, j, eps, lipschitz, num_arms};
      suite.push_back({params, hard_instance_model(params), ArrivalProcess::fixed({0})});
    }
  return suite;
}

// ---- random ---------------------------------------------------------------------------------

GreedyInstance random_greedy_instance(std::size_t num_arms, std::size_t num_agents,
                                      RandomStream& rng, IncentiveMode mode) {
  auto lattice = [&] { return static_cast<double>(rng.below(1001)) / 1000.0; };
  std::vector<double> v(num_arms);
  for (double& x : v) x = lattice();
  std::vector<std::vector<double>> mu(num_agents, std::vector<double>(num_arms));
  std::vector<std::vector<std::size_t>> prio(num_agents, std::vector<std::size_t>(num_arms));
  for (std::size_t j = 0; j < num_agents; ++j) {
    for (double& x : mu[j]) x = lattice();
    std::iota(prio[j].begin(), prio[j].end(), std::size_t{1});
    for (std::size_t i = num_arms; i > 1; --i) std::swap(prio[j][i - 1], prio[j][rng.below(i)]);
  }
  return GreedyInstance(std::move(v), std::move(mu), std::move(prio), mode);
}

}  // namespace pa
