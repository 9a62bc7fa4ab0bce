// pa: command-line front end (gen, run, verify, plot, bench).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pa/bandits.hpp"
#include "pa/greedy_general.hpp"
#include "pa/greedy_single.hpp"
#include "pa/harness.hpp"
#include "pa/instances.hpp"
#include "pa/io.hpp"
#include "pa/plot.hpp"

#ifndef PA_GOLDEN_DIR
#define PA_GOLDEN_DIR "data/golden"
#endif

namespace fs = std::filesystem;
using namespace pa;

namespace {

/// Raised for invariant violations; reported as one JSON line.
struct InvariantFailure : std::runtime_error {
  Json detail;
  InvariantFailure(const std::string& what, Json d) : std::runtime_error(what), detail(std::move(d)) {}
};

void error_line(const std::string& kind, const std::string& message, const Json& detail = {}) {
  Json j = {{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!detail.is_null()) j["detail"] = detail;
  std::cerr << j.dump() << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') == std::string::npos && text.find('[') == std::string::npos) {
    const auto n = std::stoull(text);
    if (n == 0) throw std::invalid_argument("--seeds must be positive");
    for (std::uint64_t s = 0; s < n; ++s) out.push_back(s);
    return out;
  }
  std::string cleaned;
  for (char c : text)
    if (c != '[' && c != ']' && c != ' ') cleaned += c;
  std::stringstream ss(cleaned);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw std::invalid_argument("--seeds list is empty");
  return out;
}

/// "a..b" = powers of two from a to b; otherwise a comma list.
std::vector<std::size_t> parse_horizons(const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t lo = std::stoull(text.substr(0, dots));
    const std::size_t hi = std::stoull(text.substr(dots + 2));
    if (lo == 0 || lo > hi) throw std::invalid_argument("bad --Ts range '" + text + "'");
    for (std::size_t t = lo; t <= hi; t *= 2) out.push_back(t);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw std::invalid_argument("--Ts is empty");
  return out;
}

void emit(const Json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_json_file(out, doc);
  }
}

// ---- gen ------------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  double delta = 0.705;
  std::size_t agents = 3;
  std::size_t arms = 3;
  std::size_t horizon = 100000;
  double lipschitz = 8.0;
  std::size_t arm = 0;
  std::optional<std::size_t> interval;
  std::uint64_t seed = 0;
  std::string mode = "single";
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  Json doc;
  if (a.kind == "example32") {
    const Example32 ex = example_3_2(a.delta);
    doc = instance_document("example32", ex.instance, ex.arrivals);
    doc["delta"] = a.delta;
  } else if (a.kind == "hard_b1") {
    const HardB1 h = hard_b1(a.agents, a.arms, a.horizon);
    doc = instance_document("hard_b1", h.instance, ArrivalProcess::iid(h.p));
    doc["eps"] = h.eps;
    doc["T"] = a.horizon;
  } else if (a.kind == "hard_b2") {
    const HardB2 h = hard_b2(a.agents, a.arms, a.horizon);
    const std::vector<int> base(h.k0, 0);
    doc = instance_document("hard_b2", h.instance, ArrivalProcess::iid(h.distribution(base)));
    doc["eps"] = h.eps;
    doc["T"] = a.horizon;
  } else if (a.kind == "smooth_hard") {
    const double eps = smooth_hard_epsilon(a.arms, a.lipschitz, a.horizon);
    const auto intervals = static_cast<std::size_t>(std::floor(0.5 / eps + 1e-12));
    SmoothHardInstanceParams p{a.arm, a.interval.value_or(intervals / 2), eps, a.lipschitz, a.arms};
    doc = smooth_hard_document("smooth_hard", p);
    doc["T"] = a.horizon;
  } else if (a.kind == "random") {
    RandomStream rng = StreamSplitter(a.seed).stream("instance");
    const auto inst = random_greedy_instance(a.arms, a.agents, rng, incentive_mode_from_string(a.mode));
    doc = instance_document("random", inst,
                            ArrivalProcess::iid(std::vector<double>(a.agents, 1.0 / static_cast<double>(a.agents))));
    doc["seed"] = a.seed;
  } else {
    throw std::invalid_argument("unknown --kind '" + a.kind + "'");
  }
  emit(doc, a.out);
  return 0;
}

// ---- run ---------------------------------------------------------------------------------

Scenario scenario_from_document(const InstanceDocument& doc, std::size_t horizon,
                                std::optional<double> eps, std::size_t cap) {
  if (doc.greedy) return greedy_scenario(doc.name, *doc.greedy, doc.arrivals, horizon, cap);
  return smooth_scenario(doc.name, doc.smooth, doc.arrivals, horizon, doc.mode, eps, cap);
}

std::string run_id(const std::string& instance, const std::string& policy, const std::string& hash) {
  return instance + "-" + policy + "-" + hash;
}

int cmd_run(ExperimentConfig cfg, std::size_t cap) {
  const InstanceDocument doc = instance_document_from_json(read_json_file(cfg.instance_path));
  const Scenario sc = scenario_from_document(doc, cfg.horizon, cfg.eps, cap);

  // The hash covers the resolved instance content, not its path.
  Json hashed = to_json(cfg);
  hashed["instance"] = doc.source;
  hashed.erase("out");
  hashed["cap"] = cap;
  const std::string hash = config_hash(hashed);
  const std::string id = run_id(sc.name, cfg.policy.name, hash);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "records");
  std::vector<RunRecord> runs;
  Json timing = Json::object();
  for (std::uint64_t seed : cfg.seeds) {
    const auto start = std::chrono::steady_clock::now();
    Episode ep = run_scenario(sc, cfg.policy, seed, cfg.keep_rounds);
    ep.record.config_hash = hash;
    ep.record.policy = cfg.policy.name;
    timing[std::to_string(seed)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json rec = to_json(ep.record);
    rec["benchmark"] = doc.greedy ? "exact menu maximum" : "expected utility on oracle grid";
    write_json_file((out / "records" / (id + "-seed" + std::to_string(seed) + ".json")).string(), rec);
    runs.push_back(std::move(ep.record));
  }

  const CurveSummary s = summarize(runs);
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < s.t.size(); ++k)
    rows.push_back({id, s.t[k], s.mean[k], s.stderr_[k], cfg.policy.name, sc.name, s.seeds});
  std::ofstream csv(out / "regret.csv");
  write_csv(csv, rows);
  write_json_file((out / "config.json").string(), Json{{"config", to_json(cfg)}, {"config_hash", hash}, {"cap", cap}});
  write_json_file((out / "timing.json").string(), timing);

  std::cout << Json{{"status", "ok"},
                    {"run_id", id},
                    {"seeds", runs.size()},
                    {"final_regret_mean", s.mean.back()},
                    {"benchmark_slack", sc.benchmark_slack}}
                   .dump()
            << '\n';
  return 0;
}

// ---- verify -------------------------------------------------------------------------------

void check(bool ok, const std::string& what, Json detail) {
  if (!ok) throw InvariantFailure(what, std::move(detail));
}

void verify_greedy(const std::string& name, const GreedyInstance& inst, std::size_t horizon) {
  const double tol = 1.0 / static_cast<double>(horizon);
  Menu menu = inst.mode() == IncentiveMode::SingleArm ? build_single_arm_menu(inst, horizon)
                                                       : build_general_menu(inst, horizon);
  check(!menu.empty(), "menu-nonempty", {{"instance", name}});

  // Reduction exactness: embedding coordinates equal utilities, bit for bit.
  const ArmEmbedding emb = embed_menu(inst, menu);
  for (std::size_t m = 0; m < menu.size(); ++m)
    for (std::size_t j = 0; j < inst.num_agents(); ++j)
      check(emb.vectors(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) ==
                greedy_utility(inst, menu.incentive(m), j),
            "reduction-exactness", {{"instance", name}, {"item", m}, {"agent", j}});
  std::cout << "ok " << name << " reduction-exactness items=" << menu.size() << '\n';

  // Dominance over a coarse single-arm grid.
  if (inst.mode() == IncentiveMode::SingleArm) {
    const double slack = 2.0 * perturbation_epsilon(build_raw_menu(inst), horizon) + 1e-9;
    for (std::size_t i = 0; i < inst.num_arms(); ++i)
      for (int k = 0; k <= 100; ++k) {
        const auto pi = IncentiveVector::single(inst.num_arms(), i, k / 100.0);
        bool dominated = false;
        for (const auto& item : menu) {
          bool all = true;
          for (std::size_t j = 0; j < inst.num_agents() && all; ++j)
            all = greedy_utility(inst, item.incentive, j) >= greedy_utility(inst, pi, j) - slack;
          if (all) {
            dominated = true;
            break;
          }
        }
        check(dominated, "menu-dominance", {{"instance", name}, {"arm", i + 1}, {"value", k / 100.0}});
      }
    std::cout << "ok " << name << " menu-dominance\n";
  } else {
    for (const auto& item : menu) {
      const auto& sigma = item.provenance.profile;
      for (std::size_t j = 0; j < inst.num_agents(); ++j)
        check(greedy_best_response(inst, j, item.incentive).index == sigma[j], "profile-response",
              {{"instance", name}, {"agent", j}});
    }
    std::cout << "ok " << name << " profile-response\n";
  }

  // Covering.
  const ArmEmbedding cov = cover_embeddings(emb, tol);
  check(static_cast<std::size_t>(cov.vectors.rows()) <= menu.size(), "covering-size", {{"instance", name}});
  for (Eigen::Index m = 0; m < emb.vectors.rows(); ++m) {
    double best = INFINITY;
    for (Eigen::Index c = 0; c < cov.vectors.rows(); ++c)
      best = std::min(best, (emb.vectors.row(m) - cov.vectors.row(c)).cwiseAbs().maxCoeff());
    check(best <= tol, "covering", {{"instance", name}, {"item", m}, {"distance", best}});
  }
  std::cout << "ok " << name << " covering kept=" << cov.vectors.rows() << '\n';
}

void verify_smooth(const std::string& name, const SmoothEnvironment& env) {
  RandomStream rng = StreamSplitter(0).stream("verify");
  for (std::size_t j = 0; j < env.num_agents(); ++j) {
    const auto audit = lipschitz_audit(env.agents()[j], 2000, rng);
    check(audit.passed, "lipschitz-audit",
          {{"instance", name}, {"agent", j}, {"max_ratio", audit.max_ratio}, {"L", env.agents()[j].lipschitz}});
  }
  std::cout << "ok " << name << " lipschitz-audit\n";
}

int cmd_verify(const std::string& path, std::size_t horizon) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(path);
  }
  if (files.empty()) throw std::runtime_error("no instance documents under '" + path + "'");
  for (const auto& f : files) {
    const InstanceDocument doc = instance_document_from_json(read_json_file(f.string()));
    const std::string name = f.stem().string();
    if (doc.greedy)
      verify_greedy(name, *doc.greedy, horizon);
    else
      verify_smooth(name, *doc.smooth);
  }
  std::cout << Json{{"status", "ok"}, {"instances", files.size()}}.dump() << '\n';
  return 0;
}

// ---- plot ------------------------------------------------------------------------------------

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out_dir) {
  std::vector<CsvRow> rows;
  std::map<std::string, std::vector<RunRecord>> groups;
  std::map<std::string, std::pair<std::string, std::string>> labels;
  auto add_record = [&](const fs::path& p) {
    RunRecord r = run_record_from_json(read_json_file(p.string()));
    const std::string id = run_id(r.instance, r.policy, r.config_hash);
    labels[id] = {r.policy, r.instance};
    groups[id].push_back(std::move(r));
  };
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.path().extension() == ".json" && e.path().parent_path().filename() == "records")
          files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add_record(f);
    } else if (p.extension() == ".csv") {
      std::ifstream f(p);
      if (!f) throw std::runtime_error("cannot open '" + in + "'");
      auto more = read_csv(f);
      rows.insert(rows.end(), more.begin(), more.end());
    } else {
      add_record(p);
    }
  }
  for (const auto& [id, runs] : groups) {
    const CurveSummary s = summarize(runs);
    for (std::size_t k = 0; k < s.t.size(); ++k)
      rows.push_back({id, s.t[k], s.mean[k], s.stderr_[k], labels[id].first, labels[id].second, s.seeds});
  }
  if (rows.empty()) throw std::runtime_error("no regret data found");
  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "regret.csv");
  write_csv(csv, rows);
  std::ofstream svg(fs::path(out_dir) / "regret.svg");
  svg << regret_svg(rows);
  std::cout << Json{{"status", "ok"}, {"rows", rows.size()}}.dump() << '\n';
  return 0;
}

// ---- bench ------------------------------------------------------------------------------------

struct BenchArgs {
  std::string instance = "hard_b1";
  std::string policy = "exp3linear";
  std::string horizons = "1024..65536";
  std::string seeds = "20";
  std::string out = "bench";
  std::size_t agents = 10;
  std::size_t arms = 3;
  double lipschitz = 8.0;
  double delta = 0.7005;
  std::optional<double> eps;
  std::size_t cap = 1'000'000;
};

int cmd_bench(const BenchArgs& a) {
  const auto horizons = parse_horizons(a.horizons);
  const auto seed_list = parse_seeds(a.seeds);
  PolicySpec spec;
  spec.name = a.policy;

  std::function<Scenario(std::size_t)> factory;
  if (a.instance == "hard_b1") {
    factory = [&](std::size_t t) { return hard_b1_scenario(a.agents, a.arms, t); };
  } else if (a.instance == "smooth_hard") {
    factory = [&](std::size_t t) { return smooth_hard_scenario(a.arms, a.lipschitz, t); };
  } else if (a.instance == "example32") {
    factory = [&](std::size_t t) { return example32_grid_scenario(a.delta, a.eps.value_or(0.01), t); };
  } else {
    auto doc = std::make_shared<InstanceDocument>(instance_document_from_json(read_json_file(a.instance)));
    factory = [&a, doc](std::size_t t) { return scenario_from_document(*doc, t, a.eps, a.cap); };
  }

  // Seeds are taken as a contiguous block starting at the first listed seed.
  const BenchResult r = run_bench(factory, spec, horizons, seed_list.size(), seed_list.front());
  const std::string hash = config_hash(Json{{"instance", a.instance}, {"policy", a.policy}, {"Ts", horizons},
                                            {"seeds", seed_list}, {"agents", a.agents}, {"arms", a.arms},
                                            {"L", a.lipschitz}, {"delta", a.delta}});
  const std::string id = run_id(r.instance, r.policy, hash);
  std::vector<CsvRow> rows;
  Json table = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({id, row.horizon, row.mean, row.stderr_, r.policy, r.instance, row.seeds});
    table.push_back({{"T", row.horizon}, {"mean", row.mean}, {"stderr", row.stderr_}});
  }
  fs::create_directories(a.out);
  std::ofstream csv(fs::path(a.out) / "bench.csv");
  write_csv(csv, rows);
  const Json summary = {{"status", "ok"}, {"run_id", id}, {"instance", r.instance}, {"policy", r.policy},
                        {"rows", table},  {"slope", std::isnan(r.slope) ? Json(nullptr) : Json(r.slope)}};
  write_json_file((fs::path(a.out) / "bench.json").string(), summary);
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated principal-agent incentive learning: generators, experiments, checks"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Emit an instance document");
  g->add_option("--kind", gen.kind, "example32 | hard_b1 | hard_b2 | smooth_hard | random")->required();
  g->add_option("--delta", gen.delta, "Two-type example incentive level");
  g->add_option("--agents", gen.agents, "Number of agent types");
  g->add_option("--arms", gen.arms, "Number of arms");
  g->add_option("--T", gen.horizon, "Horizon used by the construction");
  g->add_option("--L", gen.lipschitz, "Lipschitz constant (smooth_hard)");
  g->add_option("--arm", gen.arm, "Designated arm, 0-based (smooth_hard)");
  g->add_option("--interval", gen.interval, "Designated interval, 0-based (smooth_hard)");
  g->add_option("--seed", gen.seed, "Seed (random)");
  g->add_option("--mode", gen.mode, "single | general (random)");
  g->add_option("--out", gen.out, "Output file (stdout when omitted)");

  std::string config_path, instance, policy = "exp3linear", seeds = "1", out = "results";
  std::size_t horizon = 1000, cap = 1'000'000;
  std::optional<double> eps;
  bool no_rounds = false;
  auto* r = app.add_subcommand("run", "Execute an experiment and write records");
  r->add_option("--config", config_path, "Experiment configuration document");
  r->add_option("--instance", instance, "Instance document");
  r->add_option("--policy", policy, "exp3linear | tsallis | uniform | fixed");
  r->add_option("--T", horizon, "Horizon");
  r->add_option("--seeds", seeds, "Seed count or list");
  r->add_option("--out", out, "Output directory");
  r->add_option("--eps", eps, "Grid resolution for smooth instances");
  r->add_option("--cap", cap, "Bound on enumerated profiles / grid size");
  r->add_flag("--no-rounds", no_rounds, "Omit per-round tuples from records");

  std::string verify_path = PA_GOLDEN_DIR;
  std::size_t verify_T = 1000;
  auto* v = app.add_subcommand("verify", "Run invariant suites on instance documents");
  v->add_option("--instance", verify_path, "Instance document or directory");
  v->add_option("--T", verify_T, "Horizon for menu construction");

  std::vector<std::string> plot_inputs;
  std::string plot_out = "plots";
  auto* p = app.add_subcommand("plot", "Regret CSV and log-log SVG from records or CSVs");
  p->add_option("inputs", plot_inputs, "Record files, result directories or CSV files")->required();
  p->add_option("--out", plot_out, "Output directory");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Multi-horizon regret slope study");
  b->add_option("--instance", bench.instance, "hard_b1 | smooth_hard | example32 | document path");
  b->add_option("--policy", bench.policy, "exp3linear | tsallis | uniform | fixed");
  b->add_option("--Ts", bench.horizons, "a..b (powers of two) or a comma list");
  b->add_option("--seeds", bench.seeds, "Seed count or list");
  b->add_option("--out", bench.out, "Output directory");
  b->add_option("--agents", bench.agents, "Agent types (hard_b1)");
  b->add_option("--arms", bench.arms, "Arms (hard_b1, smooth_hard)");
  b->add_option("--L", bench.lipschitz, "Lipschitz constant (smooth_hard)");
  b->add_option("--delta", bench.delta, "Incentive level (example32)");
  b->add_option("--eps", bench.eps, "Grid resolution");
  b->add_option("--cap", bench.cap, "Bound on enumerated profiles / grid size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (r->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = experiment_config_from_json(read_json_file(config_path));
      if (!instance.empty()) cfg.instance_path = instance;
      if (r->count("--policy")) cfg.policy.name = policy;
      if (r->count("--T") || config_path.empty()) cfg.horizon = horizon;
      if (r->count("--seeds") || config_path.empty()) cfg.seeds = parse_seeds(seeds);
      if (r->count("--out") || config_path.empty()) cfg.out_dir = out;
      if (eps) cfg.eps = eps;
      if (no_rounds) cfg.keep_rounds = false;
      if (cfg.instance_path.empty()) throw std::invalid_argument("run needs --instance or --config");
      if (cfg.horizon == 0) throw std::invalid_argument("--T must be at least 1");
      return cmd_run(cfg, cap);
    }
    if (v->parsed()) return cmd_verify(verify_path, verify_T);
    if (p->parsed()) return cmd_plot(plot_inputs, plot_out);
    if (b->parsed()) return cmd_bench(bench);
  } catch (const InvariantFailure& e) {
    error_line("invariant", e.what(), e.detail);
    return 2;
  } catch (const std::exception& e) {
    error_line("runtime", e.what());
    return 1;
  }
  return 0;
}
