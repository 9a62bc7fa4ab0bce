#include <doctest.h>

#include <cmath>
#include <type_traits>

#include "oracles.hpp"
#include "pa/greedy_single.hpp"
#include "pa/harness.hpp"
#include "pa/io.hpp"

using namespace pa;

namespace {

// Records everything a policy is allowed to see.
class ProbePolicy final : public Policy {
 public:
  explicit ProbePolicy(std::size_t n) : n_(n) {}
  std::string name() const override { return "probe"; }
  std::size_t menu_size() const override { return n_; }
  std::size_t select(RandomStream& rng) override { return rng.below(n_); }
  void observe(std::size_t played, const Feedback& f) override { seen.push_back({played, f.arm, f.utility}); }
  struct Seen {
    std::size_t played, arm;
    double utility;
  };
  std::vector<Seen> seen;

 private:
  std::size_t n_;
};

template <class T>
concept ExposesAgent = requires(T f) { f.agent; };

std::size_t index_of(const Menu& m, std::size_t arm, double value) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& x = m.incentive(i);
    if (!x.is_zero() && x.support_arm() == arm && std::abs(x[arm] - value) < 1e-12) return i;
  }
  return m.size();
}

}  // namespace

TEST_CASE("policies never see the arriving type") {
  static_assert(!ExposesAgent<Feedback>);
  static_assert(std::is_same_v<decltype(&Policy::observe), void (Policy::*)(std::size_t, const Feedback&)>);
  static_assert(sizeof(Feedback) == sizeof(std::size_t) + sizeof(double));

  const Example32 ex = example_3_2(0.705);
  const GreedyEnvironment env(ex.instance);
  const Menu menu = build_single_arm_menu(ex.instance, 100);
  ProbePolicy probe(menu.size());
  const Episode ep = run_episode(env, menu, probe, ex.arrivals, 200, 7);
  REQUIRE(probe.seen.size() == 200);
  for (std::size_t t = 0; t < 200; ++t) {
    CHECK(probe.seen[t].played == ep.played[t]);
    CHECK(probe.seen[t].utility == ep.utilities[t]);
  }
}

TEST_CASE("episode protocol") {
  const Example32 ex = example_3_2(0.7);
  const GreedyEnvironment env(ex.instance);
  const Menu menu = build_single_arm_menu(ex.instance, 100);
  UniformPolicy uniform(menu.size());
  CHECK_THROWS(run_episode(env, menu, uniform, ex.arrivals, 0, 1));
  const Episode one = run_episode(env, menu, uniform, ex.arrivals, 1, 1, true);
  CHECK(one.record.rounds.size() == 1);
  CHECK(one.record.rounds[0].t == 1);

  FixedPolicy wrong(menu.size() + 1, 0);
  CHECK_THROWS(run_episode(env, menu, wrong, ex.arrivals, 5, 1));
  CHECK_THROWS(run_episode(env, build_single_arm_grid(4, 0.5), uniform, ex.arrivals, 5, 1));

  SUBCASE("arrivals do not depend on the policy") {
    UniformPolicy u2(menu.size());
    FixedPolicy f(menu.size(), 0);
    const auto a = run_episode(env, menu, u2, ex.arrivals, 500, 9);
    const auto b = run_episode(env, menu, f, ex.arrivals, 500, 9);
    CHECK(a.agents == b.agents);
    const auto c = run_episode(env, menu, f, ex.arrivals, 500, 10);
    CHECK(a.agents != c.agents);
  }

  SUBCASE("identical seeds give identical records") {
    const Scenario sc = greedy_scenario("ex", ex.instance, ArrivalProcess::fixed({0, 1, 1, 0, 1}), 300);
    PolicySpec spec;
    spec.name = "exp3linear";
    const auto r1 = run_scenario(sc, spec, 4, true).record;
    const auto r2 = run_scenario(sc, spec, 4, true).record;
    CHECK(to_json(r1).dump() == to_json(r2).dump());
    CHECK(r1.regret.size() == sample_schedule(300).size());
  }

  SUBCASE("always playing (delta, 0, 0) earns 0.42 per round") {
    const std::size_t idx = index_of(menu, 0, 0.7);
    REQUIRE(idx < menu.size());
    FixedPolicy fixed(menu.size(), idx);
    const Episode ep = run_episode(env, menu, fixed, ex.arrivals, 100000, 3);
    double total = 0;
    for (double u : ep.utilities) total += u;
    CHECK(std::abs(total / 1e5 - 0.42) <= 0.005);
  }
}

TEST_CASE("sample schedule") {
  CHECK(sample_schedule(1) == std::vector<std::size_t>{1});
  CHECK(sample_schedule(8) == std::vector<std::size_t>{1, 2, 4, 8});
  CHECK(sample_schedule(10) == std::vector<std::size_t>{1, 2, 4, 8, 10});
}

TEST_CASE("hindsight benchmark") {
  const Example32 ex = example_3_2(0.705);
  const GreedyEnvironment env(ex.instance);
  const std::size_t horizon = 1000;
  const Menu menu = build_single_arm_menu(ex.instance, horizon);

  // Arrivals exactly at the 0.4 / 0.6 frequencies.
  std::vector<std::size_t> agents;
  for (std::size_t t = 0; t < horizon; ++t) agents.push_back(t % 5 < 2 ? 0 : 1);
  const Hindsight h = best_fixed_in_hindsight(env, menu, agents);
  double best = -INFINITY;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const oracle::Vec pi(menu.incentive(i).values().begin(), menu.incentive(i).values().end());
    double s = 0;
    for (std::size_t j : agents)
      s += oracle::utility(ex.instance.rewards(), ex.instance.preference(j), ex.instance.tie_priority()[j], pi);
    if (s > best) best = s, best_i = i;
  }
  CHECK(h.index == best_i);
  CHECK(h.value == doctest::Approx(best).epsilon(1e-12));
  CHECK(h.value == doctest::Approx((0.6 * 0.5 + 0.4 * (1 - 0.705)) * horizon).epsilon(1e-12));
  CHECK(menu.incentive(h.index)[0] == doctest::Approx(0.705).epsilon(1e-12));

  for (std::size_t j = 0; j < 2; ++j) {
    const std::vector<std::size_t> constant(50, j);
    const Hindsight c = best_fixed_in_hindsight(env, menu, constant);
    double top = -INFINITY;
    for (const auto& item : menu) top = std::max(top, greedy_utility(ex.instance, item.incentive, j));
    CHECK(c.value == doctest::Approx(50 * top).epsilon(1e-12));
  }
  CHECK_THROWS(best_fixed_in_hindsight(env, Menu(3, IncentiveMode::SingleArm), agents));

  SUBCASE("smooth oracle grid peaks on the designated arm") {
    const SmoothHardInstanceParams params{1, 4, 0.04, 8.0, 4};
    const SmoothEnvironment senv(hard_instance_rewards(4), {hard_instance_model(params)});
    const Menu grid = build_single_arm_grid(4, 0.004);
    const Hindsight peak = best_fixed_in_expectation(senv, grid, {1.0});
    const auto& pi = grid.incentive(peak.index);
    REQUIRE_FALSE(pi.is_zero());
    CHECK(pi.support_arm() == 1);
    CHECK(std::abs(pi[1] - (4 * 0.04 + 0.02)) <= 0.04);
  }
}

TEST_CASE("regret curves") {
  const GreedyInstance inst({1.0, 0.5}, {{0.0, 0.3}}, lowest_index_priority(1, 2));
  const GreedyEnvironment env(inst);
  const Menu menu = build_single_arm_menu(inst, 100);
  const auto arrivals = ArrivalProcess::fixed({0});
  const std::vector<std::size_t> agents(64, 0);
  const Hindsight h = best_fixed_in_hindsight(env, menu, agents);
  const auto schedule = sample_schedule(64);

  FixedPolicy best(menu.size(), h.index);
  const Episode ep = run_episode(env, menu, best, arrivals, 64, 0);
  const auto bench = prefix_benchmark(env, menu, ep.agents, schedule);
  for (const auto& p : compute_regret(ep.utilities, schedule, bench.values)) CHECK(p.regret == 0.0);

  for (std::size_t i = 0; i < menu.size(); ++i) {
    if (i == h.index) continue;
    const double gap = h.value / 64 - greedy_utility(inst, menu.incentive(i), 0);
    FixedPolicy other(menu.size(), i);
    const Episode e2 = run_episode(env, menu, other, arrivals, 64, 0);
    for (const auto& p : compute_regret(e2.utilities, schedule, bench.values))
      CHECK(p.regret == doctest::Approx(gap * p.t).epsilon(1e-12));
  }
  CHECK_THROWS(compute_regret(ep.utilities, schedule, {1.0}));
}

TEST_CASE("slope fitting and summaries") {
  const std::vector<double> t{1024, 2048, 4096, 8192};
  std::vector<double> r;
  for (double x : t) r.push_back(3.0 * std::pow(x, 0.6) * (1 + 0.01 * std::sin(x)));
  CHECK(fit_slope(t, r) == doctest::Approx(oracle::loglog_slope(t, r)).epsilon(1e-12));
  CHECK(std::isnan(fit_slope({1, 2}, {1, 0})));
  CHECK_THROWS(fit_slope({1, 2}, {1}));

  RunRecord a, b;
  a.regret = {{1, 0, 0, 1.0}, {2, 0, 0, 3.0}};
  b.regret = {{1, 0, 0, 3.0}, {2, 0, 0, 3.0}};
  const CurveSummary s = summarize({a, b});
  CHECK(s.mean == std::vector<double>{2.0, 3.0});
  CHECK(s.stderr_[0] == doctest::Approx(1.0));
  CHECK(s.stderr_[1] == 0.0);
}

TEST_CASE("smooth environments sample their model") {
  const auto model = logit_model({0.2, 0.9, 0.1}, IncentiveMode::SingleArm);
  const SmoothEnvironment env({1.0, 0.5, 0.0}, {model});
  const auto pi = IncentiveVector::single(3, 0, 0.4);
  const auto p = model(pi);
  RandomStream rng = StreamSplitter(5).stream("model");
  std::vector<double> counts(3, 0);
  for (int k = 0; k < 50000; ++k) counts[env.respond(0, pi, rng).index] += 1.0 / 50000;
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(counts[i] - p[i]) < 0.01);
  CHECK(env.expected_utility(pi, 0) == doctest::Approx(p[0] * 0.6 + p[1] * 0.5));
}

TEST_CASE("scenarios") {
  const Scenario b1 = hard_b1_scenario(10, 3, 1024);
  CHECK(b1.embedding.has_value());
  CHECK(b1.benchmark_slack == 1.0);

  const Scenario sh = smooth_hard_scenario(4, 8.0, 4096);
  CHECK_FALSE(sh.embedding.has_value());
  CHECK_THROWS(sh.make_policy(PolicySpec{"exp3linear", 0, {}}));
  const double eps = choose_single_resolution(4, 8.0, 4096);
  CHECK(sh.benchmark_slack == doctest::Approx(8.0 * eps / 10 * 4096 + eps / 10 * 4096));

  RandomStream rng = StreamSplitter(2).stream("instance");
  const auto g = random_greedy_instance(3, 2, rng, IncentiveMode::General);
  const Scenario gs = greedy_scenario("general", g, ArrivalProcess::fixed({0, 1}), 200);
  CHECK(gs.benchmark_slack == 2.0);
  CHECK(gs.menu.size() <= gs.benchmark_menu.size());

  const BenchResult r = run_bench([](std::size_t t) { return hard_b1_scenario(5, 3, t); },
                                  PolicySpec{"uniform", 0, {}}, {256, 512, 1024}, 3);
  CHECK(r.rows.size() == 3);
  CHECK(r.rows[2].seeds == 3);
  CHECK(std::isfinite(r.slope));
}
