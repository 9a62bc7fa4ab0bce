#include "pa/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pa {

namespace {

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw std::invalid_argument(std::string("document is missing field '") + key + "'");
  return doc.at(key);
}

Json provenance_json(const MenuProvenance& p) {
  Json j = Json::object();
  j["arm"] = p.arm ? Json(*p.arm + 1) : Json(nullptr);
  j["agent"] = p.agent ? Json(*p.agent + 1) : Json(nullptr);
  j["perturbed"] = p.perturbed;
  if (!p.profile.empty()) {
    Json prof = Json::array();
    for (std::size_t a : p.profile) prof.push_back(a + 1);
    j["profile"] = prof;
  }
  return j;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---- greedy instances --------------------------------------------------------------

Json to_json(const GreedyInstance& instance) {
  Json doc = Json::object();
  doc["v"] = instance.rewards();
  doc["mu"] = instance.preferences();
  doc["tie_priority"] = instance.tie_priority();
  doc["mode"] = to_string(instance.mode());
  return doc;
}

GreedyInstance greedy_instance_from_json(const Json& doc) {
  auto v = require(doc, "v").get<std::vector<double>>();
  auto mu = require(doc, "mu").get<std::vector<std::vector<double>>>();
  std::vector<std::vector<std::size_t>> prio;
  if (doc.contains("tie_priority"))
    prio = doc.at("tie_priority").get<std::vector<std::vector<std::size_t>>>();
  else
    prio = lowest_index_priority(mu.size(), v.size());
  const IncentiveMode mode =
      incentive_mode_from_string(doc.value("mode", std::string("single")));
  return GreedyInstance(std::move(v), std::move(mu), std::move(prio), mode);
}

// ---- arrivals ------------------------------------------------------------------------

Json to_json(const ArrivalProcess& arrivals) {
  Json doc = Json::object();
  switch (arrivals.kind()) {
    case ArrivalProcess::Kind::FixedSequence:
      doc["kind"] = "fixed";
      doc["sequence"] = arrivals.sequence();
      break;
    case ArrivalProcess::Kind::IID:
      doc["kind"] = "iid";
      doc["probabilities"] = arrivals.probabilities();
      break;
    case ArrivalProcess::Kind::BlockSwitching: {
      doc["kind"] = "blocks";
      Json sched = Json::array();
      for (const auto& [len, agent] : arrivals.schedule()) sched.push_back({len, agent});
      doc["schedule"] = sched;
      break;
    }
    case ArrivalProcess::Kind::Adaptive:
      throw std::invalid_argument("adaptive arrival processes cannot be serialized");
  }
  return doc;
}

ArrivalProcess arrival_from_json(const Json& doc) {
  const auto kind = require(doc, "kind").get<std::string>();
  if (kind == "fixed") return ArrivalProcess::fixed(require(doc, "sequence").get<std::vector<std::size_t>>());
  if (kind == "iid")
    return ArrivalProcess::iid(require(doc, "probabilities").get<std::vector<double>>());
  if (kind == "blocks") {
    std::vector<std::pair<std::size_t, std::size_t>> sched;
    for (const auto& b : require(doc, "schedule"))
      sched.emplace_back(b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>());
    return ArrivalProcess::blocks(std::move(sched));
  }
  throw std::invalid_argument("unknown arrival kind '" + kind + "'");
}

// ---- menus ---------------------------------------------------------------------------

Json to_json(const Menu& menu) {
  Json items = Json::array();
  for (const auto& item : menu) {
    Json j = Json::object();
    if (menu.mode() == IncentiveMode::SingleArm) {
      if (item.incentive.is_zero()) {
        j["support_arm"] = nullptr;
        j["value"] = 0.0;
      } else {
        const std::size_t arm = item.incentive.support_arm();
        j["support_arm"] = arm + 1;
        j["value"] = item.incentive[arm];
      }
    } else {
      j["values"] = std::vector<double>(item.incentive.values().begin(), item.incentive.values().end());
    }
    j["provenance"] = provenance_json(item.provenance);
    items.push_back(std::move(j));
  }
  return items;
}

// ---- smooth models -------------------------------------------------------------------------

Json smooth_hard_document(const std::string& name, const SmoothHardInstanceParams& params) {
  validate(params);
  Json model = {{"kind", "hard"},         {"arm", params.arm},       {"interval", params.interval},
                {"eps", params.eps},      {"L", params.lipschitz},   {"N", params.num_arms}};
  return Json{{"type", "smooth"},
              {"name", name},
              {"v", hard_instance_rewards(params.num_arms)},
              {"mode", "single"},
              {"models", Json::array({model})},
              {"arrival", {{"kind", "fixed"}, {"sequence", {0}}}}};
}

SmoothChoiceModel smooth_model_from_json(const Json& doc, std::size_t num_arms,
                                         IncentiveMode mode) {
  const SmoothKind kind = smooth_kind_from_string(require(doc, "kind").get<std::string>());
  SmoothChoiceModel model;
  switch (kind) {
    case SmoothKind::HardInstance: {
      SmoothHardInstanceParams p;
      p.arm = require(doc, "arm").get<std::size_t>();
      p.interval = require(doc, "interval").get<std::size_t>();
      p.eps = require(doc, "eps").get<double>();
      p.lipschitz = require(doc, "L").get<double>();
      p.num_arms = doc.value("N", num_arms);
      model = hard_instance_model(p);
      break;
    }
    case SmoothKind::GaussianGreedy:
      model = gaussian_greedy_model(require(doc, "mu").get<std::vector<double>>(),
                                    doc.value("L", 0.0), mode);
      break;
    case SmoothKind::Logit:
      model = logit_model(require(doc, "mu").get<std::vector<double>>(), mode);
      break;
    case SmoothKind::Custom:
      throw std::invalid_argument("custom smooth models have no document form");
  }
  if (model.num_arms != num_arms) throw std::invalid_argument("smooth model has the wrong arm count");
  return model;
}

// ---- instance documents ----------------------------------------------------------------------

InstanceDocument instance_document_from_json(const Json& doc) {
  InstanceDocument out;
  out.source = doc;
  out.type = doc.value("type", std::string("greedy"));
  out.name = doc.value("name", std::string("instance"));
  if (out.type == "greedy") {
    out.greedy = greedy_instance_from_json(doc);
    out.mode = out.greedy->mode();
    if (doc.contains("arrival")) {
      out.arrivals = arrival_from_json(doc.at("arrival"));
    } else {
      const std::size_t k = out.greedy->num_agents();
      out.arrivals = ArrivalProcess::iid(std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }
    out.arrivals.validate_for(out.greedy->num_agents());
  } else if (out.type == "smooth") {
    auto v = require(doc, "v").get<std::vector<double>>();
    out.mode = incentive_mode_from_string(doc.value("mode", std::string("single")));
    std::vector<SmoothChoiceModel> models;
    for (const auto& m : require(doc, "models"))
      models.push_back(smooth_model_from_json(m, v.size(), out.mode));
    out.smooth = std::make_shared<const SmoothEnvironment>(std::move(v), std::move(models));
    out.arrivals = doc.contains("arrival") ? arrival_from_json(doc.at("arrival"))
                                           : ArrivalProcess::fixed({0});
    out.arrivals.validate_for(out.smooth->num_agents());
  } else {
    throw std::invalid_argument("unknown instance type '" + out.type + "'");
  }
  return out;
}

Json instance_document(const std::string& name, const GreedyInstance& instance,
                       const ArrivalProcess& arrivals) {
  Json doc = to_json(instance);
  doc["type"] = "greedy";
  doc["name"] = name;
  doc["arrival"] = to_json(arrivals);
  return doc;
}

// ---- experiment configuration ------------------------------------------------------------------

PolicySpec policy_spec_from_json(const Json& doc) {
  PolicySpec spec;
  if (doc.is_string()) {
    spec.name = doc.get<std::string>();
    return spec;
  }
  spec.name = doc.value("name", spec.name);
  if (doc.contains("eta")) spec.exp3.eta = doc.at("eta").get<double>();
  if (doc.contains("gamma")) spec.exp3.gamma = doc.at("gamma").get<double>();
  if (doc.contains("clip")) spec.exp3.clip = doc.at("clip").get<double>();
  if (doc.contains("exploration")) {
    const auto e = doc.at("exploration").get<std::string>();
    if (e == "g-optimal")
      spec.exp3.exploration = Exploration::GOptimal;
    else if (e == "uniform")
      spec.exp3.exploration = Exploration::Uniform;
    else
      throw std::invalid_argument("unknown exploration '" + e + "'");
  }
  if (doc.contains("index")) spec.fixed_index = doc.at("index").get<std::size_t>();
  return spec;
}

Json to_json(const PolicySpec& spec) {
  Json j = {{"name", spec.name}};
  if (spec.exp3.eta) j["eta"] = *spec.exp3.eta;
  if (spec.exp3.gamma) j["gamma"] = *spec.exp3.gamma;
  if (spec.exp3.clip) j["clip"] = *spec.exp3.clip;
  j["exploration"] = spec.exp3.exploration == Exploration::GOptimal ? "g-optimal" : "uniform";
  if (spec.name == "fixed") j["index"] = spec.fixed_index;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& doc) {
  ExperimentConfig c;
  c.instance_path = require(doc, "instance").get<std::string>();
  if (doc.contains("policy")) c.policy = policy_spec_from_json(doc.at("policy"));
  c.horizon = doc.value("T", c.horizon);
  if (c.horizon == 0) throw std::invalid_argument("T must be at least 1");
  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    c.seeds.clear();
    if (s.is_number_integer()) {
      for (std::uint64_t i = 0; i < s.get<std::uint64_t>(); ++i) c.seeds.push_back(i);
    } else {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    }
  }
  if (c.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (doc.contains("eps")) c.eps = doc.at("eps").get<double>();
  c.out_dir = doc.value("out", c.out_dir);
  c.keep_rounds = doc.value("keep_rounds", c.keep_rounds);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j = {{"instance", c.instance_path}, {"policy", to_json(c.policy)}, {"T", c.horizon},
            {"seeds", c.seeds},            {"out", c.out_dir},          {"keep_rounds", c.keep_rounds}};
  if (c.eps) j["eps"] = *c.eps;
  return j;
}

std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

// ---- run records -----------------------------------------------------------------------------------

Json to_json(const RunRecord& r) {
  Json regret = Json::array();
  for (const auto& p : r.regret)
    regret.push_back({{"t", p.t},
                      {"benchmark", p.benchmark},
                      {"cumulative_utility", p.cumulative_utility},
                      {"regret", p.regret}});
  Json rounds = Json::array();
  for (const auto& x : r.rounds) rounds.push_back({x.t, x.incentive_index, x.arm, x.utility});
  return {{"config_hash", r.config_hash},
          {"seed", r.seed},
          {"policy", r.policy},
          {"instance", r.instance},
          {"T", r.horizon},
          {"benchmark_slack", r.benchmark_slack},
          {"benchmark_index", r.benchmark_index},
          {"regret", regret},
          {"rounds", rounds}};
}

RunRecord run_record_from_json(const Json& doc) {
  RunRecord r;
  r.config_hash = doc.value("config_hash", std::string());
  r.seed = doc.value("seed", std::uint64_t{0});
  r.policy = doc.value("policy", std::string());
  r.instance = doc.value("instance", std::string());
  r.horizon = doc.value("T", std::size_t{0});
  r.benchmark_slack = doc.value("benchmark_slack", 0.0);
  r.benchmark_index = doc.value("benchmark_index", std::size_t{0});
  for (const auto& p : require(doc, "regret"))
    r.regret.push_back({p.at("t").get<std::size_t>(), p.at("benchmark").get<double>(),
                        p.at("cumulative_utility").get<double>(), p.at("regret").get<double>()});
  if (doc.contains("rounds"))
    for (const auto& x : doc.at("rounds"))
      r.rounds.push_back({x.at(0).get<std::size_t>(), x.at(1).get<std::size_t>(),
                          x.at(2).get<std::size_t>(), x.at(3).get<double>()});
  return r;
}

// ---- files -----------------------------------------------------------------------------------------

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

// ---- CSV ---------------------------------------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << "run_id,t,regret_mean,regret_stderr,policy,instance,seed_count\n";
  for (const auto& r : rows)
    out << r.run_id << ',' << r.t << ',' << format_double(r.regret_mean) << ','
        << format_double(r.regret_stderr) << ',' << r.policy << ',' << r.instance << ','
        << r.seed_count << '\n';
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line.rfind("run_id,", 0) != 0) throw std::invalid_argument("CSV header not recognized");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back({f[0], std::stoul(f[1]), std::stod(f[2]), std::stod(f[3]), f[4], f[5],
                    std::stoul(f[6])});
  }
  return rows;
}

}  // namespace pa
