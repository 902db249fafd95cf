#include "intfsim/scenario_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace intfsim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text, const ProfileTable& table) {
  ScenarioSpec spec;
  try {
    const json j = json::parse(json_text);
    reject_unknown(j,
                   {"name", "duration_s", "batching_window_ms", "max_batch_size",
                    "concurrency_cap", "seed", "colocation_mode", "alpha", "oracle",
                    "utilization", "deployed"},
                   "scenario");
    read_opt(j, "name", spec.name);
    read_opt(j, "duration_s", spec.duration_s);
    if (j.contains("batching_window_ms")) spec.batching_window_ms = j["batching_window_ms"].get<double>();
    read_opt(j, "max_batch_size", spec.max_batch_size);
    read_opt(j, "concurrency_cap", spec.concurrency_cap);
    read_opt(j, "seed", spec.seed);

    const std::string mode = j.value("colocation_mode", std::string("ewma"));
    if (mode == "static") {
      spec.colocation_mode = ColocationMode::static_snapshot();
    } else if (mode == "ewma") {
      spec.colocation_mode = ColocationMode::ewma(j.value("alpha", 0.5));
    } else {
      throw Error("scenario: colocation_mode must be 'static' or 'ewma', got '" + mode + "'");
    }

    if (j.contains("oracle")) {
      const auto& o = j["oracle"];
      reject_unknown(o, {"beta_l2", "beta_dram", "beta_sm", "noise_sigma", "seed"}, "oracle");
      read_opt(o, "beta_l2", spec.oracle.beta_l2);
      read_opt(o, "beta_dram", spec.oracle.beta_dram);
      read_opt(o, "beta_sm", spec.oracle.beta_sm);
      read_opt(o, "noise_sigma", spec.oracle.noise_sigma);
      read_opt(o, "seed", spec.oracle.seed);
    }

    std::vector<bool> explicit_rate;
    for (const auto& d : j.at("deployed")) {
      reject_unknown(d, {"model_id", "arrival_rate_rps", "slo_ms", "batching_window_ms", "profile"},
                     "deployed model");
      DeployedModel m;
      m.model_id = d.at("model_id").get<std::string>();
      explicit_rate.push_back(d.contains("arrival_rate_rps"));
      read_opt(d, "arrival_rate_rps", m.arrival_rate_rps);
      if (d.contains("slo_ms")) m.slo_ms = d["slo_ms"].get<double>();
      if (d.contains("batching_window_ms")) m.batching_window_ms = d["batching_window_ms"].get<double>();
      if (d.contains("profile")) m.profile = d["profile"].get<std::string>();
      spec.deployed.push_back(std::move(m));
    }

    validate_scenario(spec, &table);
    if (j.contains("utilization")) {
      const double rho = j["utilization"].get<double>();
      if (!(rho >= 0.0)) throw Error("scenario: utilization must be non-negative");
      const auto share = rho / static_cast<double>(spec.deployed.size());
      for (std::size_t i = 0; i < spec.deployed.size(); ++i) {
        if (explicit_rate[i]) continue;
        auto& m = spec.deployed[i];
        m.arrival_rate_rps = rate_for_utilization(table, m.profile_id(), share);
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path, const ProfileTable& table) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), table);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["duration_s"] = spec.duration_s;
  if (spec.batching_window_ms) j["batching_window_ms"] = *spec.batching_window_ms;
  j["max_batch_size"] = spec.max_batch_size;
  j["concurrency_cap"] = spec.concurrency_cap;
  j["seed"] = spec.seed;
  j["colocation_mode"] = spec.colocation_mode.name();
  if (spec.colocation_mode.kind == ColocationMode::Kind::Ewma) j["alpha"] = spec.colocation_mode.alpha;
  j["oracle"] = {{"beta_l2", spec.oracle.beta_l2},
                 {"beta_dram", spec.oracle.beta_dram},
                 {"beta_sm", spec.oracle.beta_sm},
                 {"noise_sigma", spec.oracle.noise_sigma},
                 {"seed", spec.oracle.seed}};
  json deployed = json::array();
  for (const auto& m : spec.deployed) {
    json d;
    d["model_id"] = m.model_id;
    d["arrival_rate_rps"] = m.arrival_rate_rps;
    if (m.slo_ms) d["slo_ms"] = *m.slo_ms;
    if (m.batching_window_ms) d["batching_window_ms"] = *m.batching_window_ms;
    if (m.profile) d["profile"] = *m.profile;
    deployed.push_back(std::move(d));
  }
  j["deployed"] = std::move(deployed);
  return j.dump(2);
}

}  // namespace intfsim
