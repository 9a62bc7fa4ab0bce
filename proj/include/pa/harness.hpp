#pragma once

// Episode execution, hindsight benchmarks, regret, and the named scenarios
// shared by the CLI and the acceptance suite.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pa/bandits.hpp"
#include "pa/core.hpp"
#include "pa/instances.hpp"
#include "pa/menu.hpp"
#include "pa/rng.hpp"
#include "pa/smooth.hpp"

namespace pa {

// ---- policy interface ------------------------------------------------------

/// Everything the principal learns after a round. The arriving agent type is
/// deliberately absent.
struct Feedback {
  std::size_t arm = 0;
  double utility = 0.0;
};

/// A learner over a finite menu. select() returns a menu index; observe()
/// receives only the Feedback for the index it played.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual std::size_t menu_size() const = 0;
  virtual std::size_t select(RandomStream& rng) = 0;
  virtual void observe(std::size_t played, const Feedback& feedback) = 0;
};

/// Always plays one menu index.
class FixedPolicy final : public Policy {
 public:
  FixedPolicy(std::size_t menu_size, std::size_t index);
  std::string name() const override { return "fixed"; }
  std::size_t menu_size() const override { return size_; }
  std::size_t select(RandomStream&) override { return index_; }
  void observe(std::size_t, const Feedback&) override {}

 private:
  std::size_t size_;
  std::size_t index_;
};

/// Uniformly random menu index each round.
class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(std::size_t menu_size);
  std::string name() const override { return "uniform"; }
  std::size_t menu_size() const override { return size_; }
  std::size_t select(RandomStream& rng) override { return rng.below(size_); }
  void observe(std::size_t, const Feedback&) override {}

 private:
  std::size_t size_;
};

/// EXP3-linear over an embedded menu; rewards are the realized utilities.
class Exp3LinearPolicy final : public Policy {
 public:
  Exp3LinearPolicy(ArmEmbedding embedding, std::size_t menu_size, std::size_t horizon,
                   const Exp3LinearConfig& config = {});
  std::string name() const override { return "exp3linear"; }
  std::size_t menu_size() const override { return size_; }
  std::size_t select(RandomStream& rng) override;
  void observe(std::size_t played, const Feedback& feedback) override;
  const Exp3Linear& learner() const { return learner_; }

 private:
  Exp3Linear learner_;
  std::vector<std::size_t> source_;
  std::size_t size_;
  std::size_t last_arm_ = 0;
};

/// Tsallis-INF with every menu item as an arm; loss = (1 - utility) / 2.
class TsallisPolicy final : public Policy {
 public:
  explicit TsallisPolicy(std::size_t menu_size);
  std::string name() const override { return "tsallis"; }
  std::size_t menu_size() const override { return learner_.num_arms(); }
  std::size_t select(RandomStream& rng) override { return learner_.step(rng); }
  void observe(std::size_t played, const Feedback& feedback) override;
  TsallisInf& learner() { return learner_; }

 private:
  TsallisInf learner_;
};

// ---- environments --------------------------------------------------------------

/// The agent side of the protocol.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t num_arms() const = 0;
  virtual std::size_t num_agents() const = 0;
  /// Arm chosen by agent type `agent`; `rng` is the model-noise stream.
  virtual ChosenArm respond(std::size_t agent, const IncentiveVector& pi, RandomStream& rng) const = 0;
  virtual double principal_reward(std::size_t arm) const = 0;
  /// E[U(pi, agent)] over the agent's randomization.
  virtual double expected_utility(const IncentiveVector& pi, std::size_t agent) const = 0;
  virtual bool deterministic() const = 0;
};

class GreedyEnvironment final : public Environment {
 public:
  explicit GreedyEnvironment(GreedyInstance instance) : instance_(std::move(instance)) {}
  std::size_t num_arms() const override { return instance_.num_arms(); }
  std::size_t num_agents() const override { return instance_.num_agents(); }
  ChosenArm respond(std::size_t agent, const IncentiveVector& pi, RandomStream&) const override {
    return greedy_best_response(instance_, agent, pi);
  }
  double principal_reward(std::size_t arm) const override { return instance_.reward(arm); }
  double expected_utility(const IncentiveVector& pi, std::size_t agent) const override {
    return greedy_utility(instance_, pi, agent);
  }
  bool deterministic() const override { return true; }
  const GreedyInstance& instance() const { return instance_; }

 private:
  GreedyInstance instance_;
};

/// One smooth model per agent type, shared principal rewards.
class SmoothEnvironment final : public Environment {
 public:
  SmoothEnvironment(std::vector<double> rewards, std::vector<SmoothChoiceModel> agents);
  std::size_t num_arms() const override { return rewards_.size(); }
  std::size_t num_agents() const override { return agents_.size(); }
  ChosenArm respond(std::size_t agent, const IncentiveVector& pi, RandomStream& rng) const override;
  double principal_reward(std::size_t arm) const override { return rewards_[arm]; }
  double expected_utility(const IncentiveVector& pi, std::size_t agent) const override;
  bool deterministic() const override { return false; }
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<SmoothChoiceModel>& agents() const { return agents_; }
  double lipschitz() const;

 private:
  std::vector<double> rewards_;
  std::vector<SmoothChoiceModel> agents_;
};

// ---- episodes ------------------------------------------------------------------------

struct RoundRecord {
  std::size_t t = 0;  // 1-based
  std::size_t incentive_index = 0;
  std::size_t arm = 0;
  double utility = 0.0;
};

struct RegretPoint {
  std::size_t t = 0;
  double benchmark = 0.0;
  double cumulative_utility = 0.0;
  double regret = 0.0;
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string policy;
  std::string instance;
  std::size_t horizon = 0;
  std::vector<RoundRecord> rounds;  // empty when not kept
  std::vector<RegretPoint> regret;  // at sample_schedule(horizon)
  double benchmark_slack = 0.0;
  std::size_t benchmark_index = 0;  // best fixed item at the horizon
};

struct Episode {
  RunRecord record;
  std::vector<std::size_t> agents;     // hidden arrivals, for the benchmark only
  std::vector<double> utilities;       // realized, per round
  std::vector<std::size_t> played;     // menu index per round
};

/// Runs the protocol for T rounds. Streams "arrivals", "policy" and "model"
/// are split from `seed`.
Episode run_episode(const Environment& env, const Menu& menu, Policy& policy,
                    const ArrivalProcess& arrivals, std::size_t horizon, std::uint64_t seed,
                    bool keep_rounds = false);

/// 1, 2, 4, ... up to T, plus T itself.
std::vector<std::size_t> sample_schedule(std::size_t horizon);

// ---- benchmarks & regret ------------------------------------------------------------------

struct Hindsight {
  std::size_t index = 0;  // into the candidate menu
  double value = 0.0;
};

/// max over candidates of sum_t E[U(pi, j_t)] (exact for greedy models).
Hindsight best_fixed_in_hindsight(const Environment& env, const Menu& candidates,
                                  const std::vector<std::size_t>& agents);

/// Same, against a distribution over types, per round.
Hindsight best_fixed_in_expectation(const Environment& env, const Menu& candidates,
                                    const std::vector<double>& agent_distribution);

/// Benchmark value for every prefix in `schedule`, and the maximizer at the end.
struct BenchmarkCurve {
  std::vector<double> values;
  std::size_t best_index = 0;
};

BenchmarkCurve prefix_benchmark(const Environment& env, const Menu& candidates,
                                const std::vector<std::size_t>& agents,
                                const std::vector<std::size_t>& schedule);

/// regret(t) = benchmark(t) - sum_{s<=t} utility_s.
std::vector<RegretPoint> compute_regret(const std::vector<double>& utilities,
                                        const std::vector<std::size_t>& schedule,
                                        const std::vector<double>& benchmark);

/// Least-squares slope of log(regret) against log(T).
double fit_slope(const std::vector<double>& horizons, const std::vector<double>& regrets);

// ---- scenarios ---------------------------------------------------------------------------

struct PolicySpec {
  std::string name = "exp3linear";  // exp3linear | tsallis | uniform | fixed
  std::size_t fixed_index = 0;
  Exp3LinearConfig exp3;
};

/// A fully specified experiment at one horizon.
struct Scenario {
  std::string name;
  std::shared_ptr<const Environment> env;
  Menu menu;            // the learner's arms
  Menu benchmark_menu;  // hindsight candidates
  double benchmark_slack = 0.0;
  ArrivalProcess arrivals;
  std::optional<ArmEmbedding> embedding;  // for linear-bandit policies
  std::size_t horizon = 0;

  std::unique_ptr<Policy> make_policy(const PolicySpec& spec) const;
};

/// Greedy instance from a document: single-arm menus are raw -> perturb -> reduce;
/// general menus are the shifted vertices, covered at 1/T. `cap` bounds the
/// number of response profiles enumerated for general menus.
Scenario greedy_scenario(std::string name, const GreedyInstance& instance,
                         const ArrivalProcess& arrivals, std::size_t horizon,
                         std::size_t cap = 1'000'000);

/// hard_b1 rebuilt at eps = sqrt((K-2)/(10T)) with IID arrivals from p.
Scenario hard_b1_scenario(std::size_t num_agents, std::size_t num_arms, std::size_t horizon);

/// The two-type example with the learner restricted to the fixed single-arm grid at
/// `grid_eps`; the benchmark is the tie-robust menu.
Scenario example32_grid_scenario(double delta, double grid_eps, std::size_t horizon);

/// One member of the smooth lower-bound family at horizon T (arm 0, middle
/// interval) against Tsallis-INF on the prescribed single-arm grid; the
/// benchmark grid is ten times finer.
Scenario smooth_hard_scenario(std::size_t num_arms, double lipschitz, std::size_t horizon);

/// Smooth instance from explicit models (grid at the prescribed resolution
/// unless `eps` is given; `cap` bounds hypercube grid sizes).
Scenario smooth_scenario(std::string name, std::shared_ptr<const SmoothEnvironment> env,
                         const ArrivalProcess& arrivals, std::size_t horizon,
                         IncentiveMode mode = IncentiveMode::SingleArm,
                         std::optional<double> eps = std::nullopt, std::size_t cap = 1'000'000);

/// Runs one seed of a scenario and fills the regret curve.
Episode run_scenario(const Scenario& scenario, const PolicySpec& policy, std::uint64_t seed,
                     bool keep_rounds = false);

// ---- multi-seed, multi-horizon studies ---------------------------------------------------

struct CurveSummary {
  std::vector<std::size_t> t;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t seeds = 0;
};

/// Mean and standard error across runs, point by point.
CurveSummary summarize(const std::vector<RunRecord>& runs);

struct BenchRow {
  std::size_t horizon = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t seeds = 0;
};

struct BenchResult {
  std::string instance;
  std::string policy;
  std::vector<BenchRow> rows;
  double slope = 0.0;
};

/// For each T, builds the scenario with `factory(T)` and runs seeds 0..seeds-1.
BenchResult run_bench(const std::function<Scenario(std::size_t)>& factory, const PolicySpec& policy,
                      const std::vector<std::size_t>& horizons, std::size_t seeds,
                      std::uint64_t base_seed = 0);

}  // namespace pa
