#include <doctest.h>

#include <sstream>

#include "pa/greedy_single.hpp"
#include "pa/io.hpp"

using namespace pa;

TEST_CASE("instance documents round-trip") {
  const Example32 ex = example_3_2(0.705);
  const Json doc = instance_document("ex", ex.instance, ex.arrivals);
  CHECK(doc["tie_priority"][0][0] == 3);
  const InstanceDocument back = instance_document_from_json(Json::parse(doc.dump()));
  REQUIRE(back.greedy);
  CHECK(*back.greedy == ex.instance);
  CHECK(back.arrivals.probabilities() == ex.arrivals.probabilities());

  const auto blocks = ArrivalProcess::blocks({{3, 0}, {2, 1}});
  CHECK(arrival_from_json(to_json(blocks)).schedule() == blocks.schedule());
  const auto fixed = ArrivalProcess::fixed({1, 0});
  CHECK(arrival_from_json(to_json(fixed)).sequence() == fixed.sequence());

  const Json smooth = smooth_hard_document("s", {1, 2, 0.05, 8.0, 4});
  const InstanceDocument sd = instance_document_from_json(smooth);
  REQUIRE(sd.smooth);
  CHECK(sd.smooth->num_arms() == 4);
  CHECK(sd.smooth->lipschitz() == 8.0);

  CHECK_THROWS(instance_document_from_json(Json{{"type", "greedy"}, {"v", {1.0}}}));
  CHECK_THROWS(instance_document_from_json(Json{{"type", "weird"}}));
  CHECK_THROWS(arrival_from_json(Json{{"kind", "markov"}}));
}

TEST_CASE("menu documents use 1-based arms") {
  const Example32 ex = example_3_2(0.705);
  const Json m = to_json(build_single_arm_menu(ex.instance, 100));
  CHECK(m[0]["support_arm"].is_null());
  CHECK(m[1]["support_arm"] == 1);
}

TEST_CASE("experiment configuration") {
  const Json doc = {{"instance", "x.json"}, {"policy", {{"name", "tsallis"}}}, {"T", 500}, {"seeds", 3}};
  const ExperimentConfig c = experiment_config_from_json(doc);
  CHECK(c.policy.name == "tsallis");
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(c.horizon == 500);
  const ExperimentConfig again = experiment_config_from_json(to_json(c));
  CHECK(again.seeds == c.seeds);
  CHECK(config_hash(to_json(c)) == config_hash(to_json(again)));
  CHECK(config_hash(to_json(c)).size() == 16);

  CHECK_THROWS(experiment_config_from_json(Json{{"instance", "x"}, {"T", 0}}));
  CHECK_THROWS(experiment_config_from_json(Json{{"instance", "x"}, {"seeds", Json::array()}}));
  CHECK_THROWS(experiment_config_from_json(Json{{"T", 5}}));

  const PolicySpec p = policy_spec_from_json(Json{{"name", "exp3linear"}, {"eta", 0.1}, {"exploration", "uniform"}});
  CHECK(*p.exp3.eta == 0.1);
  CHECK(p.exp3.exploration == Exploration::Uniform);
}

TEST_CASE("run records and CSV round-trip") {
  RunRecord r;
  r.config_hash = "abc";
  r.seed = 4;
  r.policy = "tsallis";
  r.instance = "ex";
  r.horizon = 2;
  r.rounds = {{1, 0, 1, 0.5}, {2, 1, 0, 0.1}};
  r.regret = {{1, 0.6, 0.5, 0.1}, {2, 1.2, 0.6, 0.6}};
  const RunRecord back = run_record_from_json(Json::parse(to_json(r).dump()));
  CHECK(to_json(back) == to_json(r));

  std::stringstream ss;
  write_csv(ss, {{"id", 8, 0.1, 0.02, "tsallis", "ex", 3}});
  CHECK(ss.str().rfind("run_id,t,regret_mean,regret_stderr,policy,instance,seed_count\n", 0) == 0);
  const auto rows = read_csv(ss);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].regret_mean == 0.1);
  CHECK(rows[0].seed_count == 3);

  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
}
