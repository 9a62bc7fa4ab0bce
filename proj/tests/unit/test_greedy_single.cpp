#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "pa/greedy_single.hpp"
#include "pa/instances.hpp"

using namespace pa;

namespace {

bool contains(const Menu& menu, std::size_t arm, double value, double tol = 1e-15) {
  for (const auto& item : menu) {
    if (item.incentive.is_zero()) {
      if (value == 0.0) return true;
      continue;
    }
    if (item.incentive.support_arm() == arm && std::abs(item.incentive[arm] - value) <= tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("raw menu holds the least incentive per (arm, agent)") {
  const GreedyInstance inst({1.0, 1.0, 1.0}, {{0.3, 0.7, 0.1}}, lowest_index_priority(1, 3));
  const Menu raw = build_raw_menu(inst);
  CHECK(raw.size() == 3);
  CHECK(raw[0].incentive.is_zero());
  CHECK(contains(raw, 0, 0.4));
  CHECK(contains(raw, 2, 0.6));

  const Example32 ex = example_3_2(0.705);
  CHECK(contains(build_raw_menu(ex.instance), 0, 0.705));

  const GreedyInstance flat({0.2, 0.4}, {{0.5, 0.5}}, lowest_index_priority(1, 2));
  CHECK(build_raw_menu(flat).size() == 1);
}

TEST_CASE("perturbation adds shifted copies") {
  const GreedyInstance inst({1.0, 0.0}, {{0.3, 0.7}}, lowest_index_priority(1, 2));
  const Menu raw = build_raw_menu(inst);
  CHECK(menu_value_gap(raw) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(perturbation_epsilon(raw, 10) == doctest::Approx(0.05).epsilon(1e-14));
  const Menu shifted = perturb_menu(inst, raw, 10);
  CHECK(contains(shifted, 0, 0.05, 1e-14));
  CHECK(contains(shifted, 0, 0.45, 1e-14));
  CHECK(contains(shifted, 1, 0.05, 1e-14));
  for (const auto& item : shifted)
    for (double x : item.incentive.values()) CHECK(x <= 1.0);

  // Large T: the shift is 1/(2T) and shrinks to zero.
  CHECK(perturbation_epsilon(raw, 1000000) == doctest::Approx(0.5e-6));

  const GreedyInstance single({0.7}, {{0.5}}, lowest_index_priority(1, 1));
  const Menu only_zero = build_raw_menu(single);
  CHECK(menu_value_gap(only_zero) == 1.0);
  CHECK(perturbation_epsilon(only_zero, 1) == 0.5);
  CHECK(perturbation_epsilon(only_zero, 7) == doctest::Approx(1.0 / 14.0));
}

TEST_CASE("response signatures") {
  const GreedyInstance inst({1.0, 0.5, 0.0}, {{0.0, 0.6, 0.1}, {0.3, 0.2, 0.9}}, lowest_index_priority(2, 3));
  const auto all = response_signature(inst, IncentiveVector::single(3, 0, 1.0));
  CHECK(all.bits == std::vector<bool>{true, true});
  const auto none = response_signature(inst, IncentiveVector::single(3, 0, 0.01));
  CHECK(none.bits == std::vector<bool>{false, false});
  CHECK_THROWS_AS(response_signature(inst, IncentiveVector::zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(response_signature(inst, IncentiveVector({0.1, 0.1, 0.0}, IncentiveMode::General)),
                  std::invalid_argument);

  SUBCASE("the two-type example around the tie") {
    const Example32 ex = example_3_2(0.7);
    const double eps = perturbation_epsilon(build_raw_menu(ex.instance), 100);
    const auto& g = ex.instance;
    for (double value : {0.7 - eps, 0.7, 0.7 + eps}) {
      const auto pi = IncentiveVector::single(3, 0, value);
      std::vector<bool> expected;
      for (std::size_t j = 0; j < 2; ++j)
        expected.push_back(oracle::respond(g.preference(j), g.tie_priority()[j], oracle::unit(3, 0, value)) == 0);
      CHECK(response_signature(g, pi).bits == expected);
    }
    // At exactly delta each agent keeps its tie favorite; any extra moves both to arm 1.
    CHECK(response_signature(g, IncentiveVector::single(3, 0, 0.7)).bits == std::vector<bool>{true, false});
    CHECK(response_signature(g, IncentiveVector::single(3, 0, 0.7 + eps)).bits == std::vector<bool>{true, true});
  }
}

TEST_CASE("reduction keeps the best item per signature") {
  const GreedyInstance inst({1.0, 0.0}, {{0.0, 0.3}}, lowest_index_priority(1, 2));
  Menu m(2, IncentiveMode::SingleArm);
  m.add(IncentiveVector::zero(2));
  m.add(IncentiveVector::single(2, 0, 0.5));
  m.add(IncentiveVector::single(2, 0, 0.4));
  const Menu r = reduce_menu(inst, m);
  REQUIRE(r.size() == 2);
  CHECK(r[0].incentive.is_zero());
  CHECK(r[1].incentive[0] == 0.4);

  SUBCASE("distinct signatures survive, in (arm, value) order") {
    const GreedyInstance two({1.0, 1.0}, {{0.0, 0.3}, {0.0, 0.6}}, lowest_index_priority(2, 2));
    Menu n(2, IncentiveMode::SingleArm);
    n.add(IncentiveVector::single(2, 0, 0.6));
    n.add(IncentiveVector::zero(2));
    n.add(IncentiveVector::single(2, 0, 0.3));
    const Menu out = reduce_menu(two, n);
    REQUIRE(out.size() == 3);
    CHECK(out[0].incentive.is_zero());
    CHECK(out[1].incentive[0] == 0.3);
    CHECK(out[2].incentive[0] == 0.6);
  }
}

TEST_CASE("reduced menu dominates the fine single-arm grid") {
  RandomStream rng = StreamSplitter(5).stream("dominance");
  const std::size_t n = 5, k = 3, horizon = 100;
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = random_greedy_instance(n, k, rng);
    const Menu menu = build_single_arm_menu(inst, horizon);
    const double slack = 2.0 * perturbation_epsilon(build_raw_menu(inst), horizon) + 1e-9;

    std::vector<oracle::Vec> item_utils;
    for (const auto& item : menu) {
      const oracle::Vec pi(item.incentive.values().begin(), item.incentive.values().end());
      oracle::Vec u;
      for (std::size_t j = 0; j < k; ++j)
        u.push_back(oracle::utility(inst.rewards(), inst.preference(j), inst.tie_priority()[j], pi));
      item_utils.push_back(u);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (int step = 0; step <= 1000; ++step) {
        const auto pi = oracle::unit(n, i, step / 1000.0);
        oracle::Vec target;
        for (std::size_t j = 0; j < k; ++j)
          target.push_back(oracle::utility(inst.rewards(), inst.preference(j), inst.tie_priority()[j], pi));
        bool dominated = false;
        for (const auto& u : item_utils) {
          bool all = true;
          for (std::size_t j = 0; j < k; ++j) all = all && u[j] >= target[j] - slack;
          dominated = dominated || all;
        }
        REQUIRE_MESSAGE(dominated, "arm " << i << " value " << step / 1000.0);
      }
  }
}
