#include "pa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pa/greedy_general.hpp"
#include "pa/greedy_single.hpp"

namespace pa {

// ---- policies ----------------------------------------------------------------------

FixedPolicy::FixedPolicy(std::size_t menu_size, std::size_t index) : size_(menu_size), index_(index) {
  if (index >= menu_size) throw std::invalid_argument("fixed policy index out of range");
}

UniformPolicy::UniformPolicy(std::size_t menu_size) : size_(menu_size) {
  if (menu_size == 0) throw std::invalid_argument("uniform policy needs a nonempty menu");
}

Exp3LinearPolicy::Exp3LinearPolicy(ArmEmbedding embedding, std::size_t menu_size,
                                   std::size_t horizon, const Exp3LinearConfig& config)
    : learner_(embedding, horizon, config), source_(embedding.source), size_(menu_size) {
  for (std::size_t s : source_)
    if (s >= menu_size) throw std::invalid_argument("embedding refers to a missing menu item");
}

std::size_t Exp3LinearPolicy::select(RandomStream& rng) {
  last_arm_ = learner_.step(rng);
  return source_[last_arm_];
}

void Exp3LinearPolicy::observe(std::size_t played, const Feedback& feedback) {
  if (played != source_[last_arm_]) throw std::logic_error("observe() for an item not selected");
  learner_.update(last_arm_, std::clamp(feedback.utility, -1.0, 1.0));
}

TsallisPolicy::TsallisPolicy(std::size_t menu_size) : learner_(menu_size) {}

void TsallisPolicy::observe(std::size_t played, const Feedback& feedback) {
  learner_.update(played, std::clamp((1.0 - feedback.utility) / 2.0, 0.0, 1.0));
}

// ---- environments -------------------------------------------------------------------

SmoothEnvironment::SmoothEnvironment(std::vector<double> rewards,
                                     std::vector<SmoothChoiceModel> agents)
    : rewards_(std::move(rewards)), agents_(std::move(agents)) {
  if (rewards_.empty()) throw std::invalid_argument("smooth environment needs arms");
  if (agents_.empty()) throw std::invalid_argument("smooth environment needs agent types");
  for (double v : rewards_)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("principal rewards must lie in [0,1]");
  for (const auto& m : agents_)
    if (m.num_arms != rewards_.size() || !m.probabilities)
      throw std::invalid_argument("smooth model does not match the number of arms");
}

ChosenArm SmoothEnvironment::respond(std::size_t agent, const IncentiveVector& pi,
                                     RandomStream& rng) const {
  return ChosenArm{rng.categorical(agents_.at(agent)(pi))};
}

double SmoothEnvironment::expected_utility(const IncentiveVector& pi, std::size_t agent) const {
  return expected_smooth_utility(agents_.at(agent), rewards_, pi);
}

double SmoothEnvironment::lipschitz() const {
  double l = 1.0;
  for (const auto& m : agents_) l = std::max(l, m.lipschitz);
  return l;
}

// ---- episodes --------------------------------------------------------------------------

std::vector<std::size_t> sample_schedule(std::size_t horizon) {
  std::vector<std::size_t> s;
  for (std::size_t t = 1; t <= horizon; t *= 2) {
    s.push_back(t);
    if (t > horizon / 2) break;
  }
  if (s.empty() || s.back() != horizon) s.push_back(horizon);
  return s;
}

Episode run_episode(const Environment& env, const Menu& menu, Policy& policy,
                    const ArrivalProcess& arrivals, std::size_t horizon, std::uint64_t seed,
                    bool keep_rounds) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (menu.num_arms() != env.num_arms()) throw std::invalid_argument("menu does not match model");
  if (policy.menu_size() != menu.size())
    throw std::invalid_argument("policy arm set does not match the menu");
  arrivals.validate_for(env.num_agents());

  const StreamSplitter split(seed);
  RandomStream arrival_rng = split.stream("arrivals");
  RandomStream policy_rng = split.stream("policy");
  RandomStream model_rng = split.stream("model");

  Episode ep;
  ep.record.seed = seed;
  ep.record.policy = policy.name();
  ep.record.horizon = horizon;
  ep.agents.reserve(horizon);
  ep.utilities.reserve(horizon);
  ep.played.reserve(horizon);
  std::vector<RoundTrace> history;
  if (arrivals.kind() == ArrivalProcess::Kind::Adaptive) history.reserve(horizon);

  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t agent = arrivals.next(t, arrival_rng, history);
    const std::size_t idx = policy.select(policy_rng);
    if (idx >= menu.size()) throw std::out_of_range("policy selected an index outside the menu");
    const IncentiveVector& pi = menu.incentive(idx);
    const ChosenArm chosen = env.respond(agent, pi, model_rng);
    const double u = env.principal_reward(chosen.index) - pi[chosen.index];
    policy.observe(idx, Feedback{chosen.index, u});

    ep.agents.push_back(agent);
    ep.utilities.push_back(u);
    ep.played.push_back(idx);
    if (arrivals.kind() == ArrivalProcess::Kind::Adaptive) history.push_back({idx, chosen.index});
    if (keep_rounds) ep.record.rounds.push_back({t + 1, idx, chosen.index, u});
  }
  return ep;
}

// ---- benchmarks ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> utility_table(const Environment& env, const Menu& candidates,
                                               const std::vector<bool>& needed) {
  std::vector<std::vector<double>> table(candidates.size(),
                                         std::vector<double>(env.num_agents(), 0.0));
  for (std::size_t m = 0; m < candidates.size(); ++m)
    for (std::size_t j = 0; j < env.num_agents(); ++j)
      if (needed[j]) table[m][j] = env.expected_utility(candidates.incentive(m), j);
  return table;
}

Hindsight best_weighted(const std::vector<std::vector<double>>& table,
                        const std::vector<double>& weights) {
  Hindsight best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t m = 0; m < table.size(); ++m) {
    double v = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j)
      if (weights[j] != 0.0) v += weights[j] * table[m][j];
    if (v > best.value) best = {m, v};
  }
  return best;
}

}  // namespace

BenchmarkCurve prefix_benchmark(const Environment& env, const Menu& candidates,
                                const std::vector<std::size_t>& agents,
                                const std::vector<std::size_t>& schedule) {
  if (candidates.empty()) throw std::invalid_argument("hindsight benchmark needs candidates");
  if (candidates.num_arms() != env.num_arms())
    throw std::invalid_argument("candidate menu does not match model");
  std::vector<bool> needed(env.num_agents(), false);
  for (std::size_t j : agents) {
    if (j >= env.num_agents()) throw std::out_of_range("agent index out of range");
    needed[j] = true;
  }
  const auto table = utility_table(env, candidates, needed);

  BenchmarkCurve curve;
  if (env.deterministic()) {
    // Accumulate round by round, in the same order a policy's utilities are
    // summed, so a policy that plays the benchmark item has regret exactly 0.
    std::vector<double> totals(candidates.size(), 0.0);
    std::size_t t = 0;
    for (std::size_t s : schedule) {
      if (s > agents.size() || s < t) throw std::invalid_argument("schedule does not fit the arrivals");
      for (std::size_t m = 0; m < totals.size(); ++m)
        for (std::size_t r = t; r < s; ++r) totals[m] += table[m][agents[r]];
      t = s;
      const auto best = std::max_element(totals.begin(), totals.end());
      curve.values.push_back(*best);
      curve.best_index = static_cast<std::size_t>(best - totals.begin());
    }
    return curve;
  }
  std::vector<double> counts(env.num_agents(), 0.0);
  std::size_t t = 0;
  for (std::size_t s : schedule) {
    if (s > agents.size() || s < t) throw std::invalid_argument("schedule does not fit the arrivals");
    for (; t < s; ++t) counts[agents[t]] += 1.0;
    const Hindsight h = best_weighted(table, counts);
    curve.values.push_back(h.value);
    curve.best_index = h.index;
  }
  return curve;
}

Hindsight best_fixed_in_hindsight(const Environment& env, const Menu& candidates,
                                  const std::vector<std::size_t>& agents) {
  if (agents.empty()) throw std::invalid_argument("empty arrival sequence");
  const auto curve = prefix_benchmark(env, candidates, agents, {agents.size()});
  return {curve.best_index, curve.values.back()};
}

Hindsight best_fixed_in_expectation(const Environment& env, const Menu& candidates,
                                    const std::vector<double>& agent_distribution) {
  if (candidates.empty()) throw std::invalid_argument("hindsight benchmark needs candidates");
  if (agent_distribution.size() != env.num_agents())
    throw std::invalid_argument("distribution has wrong length");
  require_distribution(agent_distribution, kDistributionTolerance, "agent distribution");
  std::vector<bool> needed(env.num_agents());
  for (std::size_t j = 0; j < needed.size(); ++j) needed[j] = agent_distribution[j] > 0.0;
  return best_weighted(utility_table(env, candidates, needed), agent_distribution);
}

std::vector<RegretPoint> compute_regret(const std::vector<double>& utilities,
                                        const std::vector<std::size_t>& schedule,
                                        const std::vector<double>& benchmark) {
  if (schedule.size() != benchmark.size())
    throw std::invalid_argument("benchmark and schedule lengths differ");
  std::vector<RegretPoint> out;
  double acc = 0.0;
  std::size_t t = 0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] > utilities.size() || schedule[k] < t)
      throw std::invalid_argument("schedule does not fit the utilities");
    for (; t < schedule[k]; ++t) acc += utilities[t];
    out.push_back({schedule[k], benchmark[k], acc, benchmark[k] - acc});
  }
  return out;
}

double fit_slope(const std::vector<double>& horizons, const std::vector<double>& regrets) {
  if (horizons.size() != regrets.size()) throw std::invalid_argument("length mismatch");
  if (horizons.size() < 2) throw std::invalid_argument("slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(horizons.size());
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0 && regrets[i] > 0.0))
      return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(horizons[i]), y = std::log(regrets[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- scenarios ------------------------------------------------------------------------------

std::unique_ptr<Policy> Scenario::make_policy(const PolicySpec& spec) const {
  if (spec.name == "exp3linear") {
    if (!embedding) throw std::invalid_argument("exp3linear needs a greedy (embeddable) scenario");
    return std::make_unique<Exp3LinearPolicy>(*embedding, menu.size(), horizon, spec.exp3);
  }
  if (spec.name == "tsallis") return std::make_unique<TsallisPolicy>(menu.size());
  if (spec.name == "uniform") return std::make_unique<UniformPolicy>(menu.size());
  if (spec.name == "fixed") return std::make_unique<FixedPolicy>(menu.size(), spec.fixed_index);
  throw std::invalid_argument("unknown policy '" + spec.name + "'");
}

Scenario greedy_scenario(std::string name, const GreedyInstance& instance,
                         const ArrivalProcess& arrivals, std::size_t horizon, std::size_t cap) {
  Scenario sc;
  sc.name = std::move(name);
  sc.env = std::make_shared<GreedyEnvironment>(instance);
  sc.arrivals = arrivals;
  sc.horizon = horizon;
  if (instance.mode() == IncentiveMode::SingleArm) {
    sc.menu = build_single_arm_menu(instance, horizon);
    sc.benchmark_menu = sc.menu;
    sc.benchmark_slack = 1.0;
  } else {
    GeneralCaps caps;
    caps.max_profiles = cap;
    const Menu full = build_general_menu(instance, horizon, caps);
    const auto covered =
        cover_embeddings(embed_menu(instance, full), 1.0 / static_cast<double>(horizon));
    sc.menu = Menu(instance.num_arms(), IncentiveMode::General);
    for (std::size_t s : covered.source)
      sc.menu.append_unchecked(full[s].incentive, full[s].provenance);
    sc.benchmark_menu = full;
    sc.benchmark_slack = 2.0;
  }
  sc.embedding = embed_menu(instance, sc.menu);
  return sc;
}

Scenario hard_b1_scenario(std::size_t num_agents, std::size_t num_arms, std::size_t horizon) {
  const double km2 = static_cast<double>(num_agents) - 2.0;
  const double eps = std::sqrt(km2 / (10.0 * static_cast<double>(horizon)));
  const HardB1 h = hard_b1_with_epsilon(num_agents, num_arms, eps, horizon);
  return greedy_scenario("hard_b1", h.instance, ArrivalProcess::iid(h.p), horizon);
}

Scenario example32_grid_scenario(double delta, double grid_eps, std::size_t horizon) {
  const Example32 ex = example_3_2(delta);
  Scenario sc;
  sc.name = "example32";
  sc.env = std::make_shared<GreedyEnvironment>(ex.instance);
  sc.arrivals = ex.arrivals;
  sc.horizon = horizon;
  sc.menu = build_single_arm_grid(ex.instance.num_arms(), grid_eps);
  sc.benchmark_menu = build_single_arm_menu(ex.instance, horizon);
  sc.benchmark_slack = 1.0;
  sc.embedding = embed_menu(ex.instance, sc.menu);
  return sc;
}

Scenario smooth_scenario(std::string name, std::shared_ptr<const SmoothEnvironment> env,
                         const ArrivalProcess& arrivals, std::size_t horizon, IncentiveMode mode,
                         std::optional<double> eps, std::size_t cap) {
  Scenario sc;
  sc.name = std::move(name);
  sc.arrivals = arrivals;
  sc.horizon = horizon;
  const std::size_t n = env->num_arms();
  const double l = env->lipschitz();
  const double t = static_cast<double>(horizon);
  if (mode == IncentiveMode::SingleArm) {
    const double e = eps.value_or(choose_single_resolution(n, l, horizon));
    sc.menu = build_single_arm_grid(n, e);
    const double eo = e / 10.0;
    sc.benchmark_menu = build_single_arm_grid(n, eo);
    sc.benchmark_slack = l * eo * t + eo * t;
  } else {
    const double e = eps.value_or(choose_general_resolution(n, l, horizon));
    sc.menu = build_hypercube_grid(n, e, cap);
    const double eo = e / 10.0;
    sc.benchmark_menu = build_hypercube_grid(n, eo, cap);
    sc.benchmark_slack = l * eo * t + eo * t;
  }
  sc.env = std::move(env);
  return sc;
}

Scenario smooth_hard_scenario(std::size_t num_arms, double lipschitz, std::size_t horizon) {
  const double eps = smooth_hard_epsilon(num_arms, lipschitz, horizon);
  const auto intervals = static_cast<std::size_t>(std::floor(0.5 / eps + 1e-12));
  const SmoothHardInstanceParams params{0, intervals / 2, eps, lipschitz, num_arms};
  auto env = std::make_shared<const SmoothEnvironment>(
      hard_instance_rewards(num_arms), std::vector<SmoothChoiceModel>{hard_instance_model(params)});
  return smooth_scenario("smooth_hard", std::move(env), ArrivalProcess::fixed({0}), horizon);
}

Episode run_scenario(const Scenario& scenario, const PolicySpec& spec, std::uint64_t seed,
                     bool keep_rounds) {
  auto policy = scenario.make_policy(spec);
  Episode ep = run_episode(*scenario.env, scenario.menu, *policy, scenario.arrivals,
                           scenario.horizon, seed, keep_rounds);
  const auto schedule = sample_schedule(scenario.horizon);
  const auto bench = prefix_benchmark(*scenario.env, scenario.benchmark_menu, ep.agents, schedule);
  ep.record.regret = compute_regret(ep.utilities, schedule, bench.values);
  ep.record.benchmark_slack = scenario.benchmark_slack;
  ep.record.benchmark_index = bench.best_index;
  ep.record.instance = scenario.name;
  return ep;
}

// ---- studies -------------------------------------------------------------------------------------

CurveSummary summarize(const std::vector<RunRecord>& runs) {
  CurveSummary s;
  if (runs.empty()) return s;
  const std::size_t points = runs.front().regret.size();
  s.seeds = runs.size();
  for (std::size_t k = 0; k < points; ++k) {
    double sum = 0.0, sq = 0.0;
    for (const auto& r : runs) {
      if (r.regret.size() != points) throw std::invalid_argument("runs have different schedules");
      sum += r.regret[k].regret;
    }
    const double n = static_cast<double>(runs.size());
    const double mean = sum / n;
    for (const auto& r : runs) sq += (r.regret[k].regret - mean) * (r.regret[k].regret - mean);
    s.t.push_back(runs.front().regret[k].t);
    s.mean.push_back(mean);
    s.stderr_.push_back(runs.size() > 1 ? std::sqrt(sq / (n - 1.0) / n) : 0.0);
  }
  return s;
}

BenchResult run_bench(const std::function<Scenario(std::size_t)>& factory, const PolicySpec& policy,
                      const std::vector<std::size_t>& horizons, std::size_t seeds,
                      std::uint64_t base_seed) {
  if (horizons.empty() || seeds == 0) throw std::invalid_argument("bench needs horizons and seeds");
  BenchResult result;
  result.policy = policy.name;
  std::vector<double> xs, ys;
  for (std::size_t horizon : horizons) {
    const Scenario sc = factory(horizon);
    result.instance = sc.name;
    std::vector<RunRecord> runs;
    for (std::size_t s = 0; s < seeds; ++s) {
      Episode ep = run_scenario(sc, policy, base_seed + s);
      ep.record.rounds.clear();
      runs.push_back(std::move(ep.record));
    }
    const CurveSummary cs = summarize(runs);
    result.rows.push_back({horizon, cs.mean.back(), cs.stderr_.back(), seeds});
    xs.push_back(static_cast<double>(horizon));
    ys.push_back(cs.mean.back());
  }
  result.slope = horizons.size() >= 2 ? fit_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace pa
