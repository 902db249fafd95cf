// intfsim: experiment runner for the inference-serving interference simulator.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "intfsim/csv.hpp"
#include "intfsim/experiment.hpp"
#include "intfsim/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace intfsim;

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("INTFSIM_OUT_DIR"); env && *env) return env;
  return "out";
}

// "1,2,5" or "1-20" or a mix of both.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      if (auto dash = part.find('-'); dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw Error("empty seed range " + part);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(part));
      }
    } catch (const std::logic_error&) {
      throw Error("invalid seed list entry '" + part + "'");
    }
  }
  if (seeds.empty()) throw Error("at least one seed is required");
  return seeds;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      if (auto slash = part.find('/'); slash != std::string::npos) {
        out.push_back(std::stod(part.substr(0, slash)) / std::stod(part.substr(slash + 1)));
      } else {
        out.push_back(std::stod(part));
      }
    } catch (const std::logic_error&) {
      throw Error("invalid alpha '" + part + "'");
    }
  }
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

template <typename Fn>
void write_csv(const fs::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(path, os.str());
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config,
                    const std::vector<std::uint64_t>& seeds) {
  nlohmann::json j;
  j["tool"] = "intfsim";
  j["version"] = INTFSIM_VERSION;
  j["command"] = command;
  j["config_hash"] = hex(fnv1a(config));
  j["seeds"] = seeds;
  j["config"] = nlohmann::json::parse(config);
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

struct Common {
  std::string profiles;
  std::string out = default_out_dir();
  std::string seeds;  // empty: scenario seed for simulate, "1" for experiments
};

ProfileTable load_table(const Common& c) {
  if (c.profiles.empty()) return gen_synthetic_profiles(default_synthesis_spec(), kDefaultProfileSeed);
  return load_profiles(c.profiles);
}

std::string table_digest(const ProfileTable& table) {
  std::ostringstream os;
  write_profiles(table, os);
  return hex(fnv1a(os.str()));
}

ScenarioSpec reseeded(ScenarioSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  spec.oracle.seed = derive_seed(seed, fnv1a(spec.name));
  return spec;
}

int cmd_gen_profiles(const std::string& out, std::uint64_t seed) {
  const auto table = gen_synthetic_profiles(default_synthesis_spec(), seed);
  if (out == "-") {
    write_profiles(table, std::cout);
  } else {
    if (auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
    save_profiles(table, out);
    std::cout << "wrote " << table.size() << " profile entries to " << out << '\n';
  }
  return 0;
}

int cmd_validate(const Common& c, const std::vector<std::string>& scenarios) {
  const auto table = load_table(c);
  std::cout << "profiles: " << table.models().size() << " models, " << table.size()
            << " entries, OK\n";
  for (const auto& path : scenarios) {
    const auto spec = load_scenario(path, table);
    resolve_defaults(spec, table);
    std::cout << "scenario " << spec.name << " (" << path << "): " << spec.deployed.size()
              << " models, OK\n";
  }
  return 0;
}

int cmd_simulate(const Common& c, const std::vector<std::string>& scenario_paths, bool segments,
                 bool arrivals) {
  const auto table = load_table(c);
  const bool own_seed = c.seeds.empty();
  const auto seeds = own_seed ? std::vector<std::uint64_t>{} : parse_seeds(c.seeds);
  std::vector<ScenarioSpec> specs;
  for (const auto& p : scenario_paths) specs.push_back(load_scenario(p, table));

  nlohmann::json config;
  config["profiles_digest"] = table_digest(table);
  config["scenarios"] = nlohmann::json::array();
  for (const auto& s : specs) config["scenarios"].push_back(nlohmann::json::parse(scenario_to_json(s)));
  config["segments"] = segments;
  config["arrivals"] = arrivals;

  const fs::path out = c.out;
  fs::create_directories(out);
  std::vector<std::uint64_t> used;
  for (const auto& base : specs) {
    for (auto seed : own_seed ? std::vector<std::uint64_t>{base.seed} : seeds) {
      const auto spec = own_seed ? base : reseeded(base, seed);
      used.push_back(seed);
      const auto run = run_scenario(spec, table);
      const fs::path dir = out / spec.name / ("seed_" + std::to_string(seed));
      fs::create_directories(dir);
      write_csv(dir / "outcomes.csv", [&](auto& os) { write_outcomes_csv(run.outcomes, os); });
      write_csv(dir / "requests.csv", [&](auto& os) { write_requests_csv(run.requests, os); });
      write_csv(dir / "samples.csv",
                [&](auto& os) { write_samples_csv(run.samples, spec.colocation_mode, os); });
      const auto report = slo_report(run.requests, {0.1});
      write_csv(dir / "slo_report.csv", [&](auto& os) { write_slo_report_csv(report, os); });
      if (segments) {
        write_csv(dir / "segments.csv", [&](auto& os) { write_segments_csv(run.outcomes, os); });
      }
      if (arrivals) {
        const auto resolved = resolve_defaults(spec, table);
        write_csv(dir / "arrivals.csv",
                  [&](auto& os) { write_arrivals_csv(generate_arrivals(resolved), os); });
      }
      std::cout << spec.name << " seed " << seed << ": " << run.n_arrivals << " requests, "
                << run.outcomes.size() << " batches -> " << dir.string() << '\n';
    }
  }
  write_manifest(out, "simulate", config.dump(), used);
  return 0;
}

int cmd_ewma(const Common& c, const std::vector<std::string>& scenario_paths,
             const std::string& alphas_text, double split, const std::string& split_mode) {
  const auto table = load_table(c);
  const auto seeds = parse_seeds(c.seeds.empty() ? "1" : c.seeds);
  if (split_mode != "chrono" && split_mode != "random") {
    throw Error("--split-mode must be 'chrono' or 'random'");
  }
  std::vector<ColocationMode> modes{ColocationMode::static_snapshot()};
  for (double a : parse_alphas(alphas_text)) modes.push_back(ColocationMode::ewma(a));

  std::vector<ScenarioSpec> custom;
  for (const auto& p : scenario_paths) custom.push_back(load_scenario(p, table));

  nlohmann::json config;
  config["profiles_digest"] = table_digest(table);
  config["suite"] = custom.empty() ? nlohmann::json("builtin:high_churn") : nlohmann::json::array();
  for (const auto& s : custom) config["suite"].push_back(nlohmann::json::parse(scenario_to_json(s)));
  config["alphas"] = alphas_text;
  config["split"] = split;
  config["split_mode"] = split_mode;

  const fs::path out = c.out;
  fs::create_directories(out);
  std::ostringstream per_seed;
  per_seed << "seed,mode,alpha,mse,rel_p25,rel_p50,rel_p75,rel_p95,n_train,n_test\n";
  std::map<std::size_t, std::vector<EvalReport>> by_mode;
  for (auto seed : seeds) {
    std::vector<ScenarioSpec> suite;
    if (custom.empty()) {
      suite = high_churn_suite(table, seed);
    } else {
      for (const auto& s : custom) suite.push_back(reseeded(s, seed));
    }
    const auto result =
        run_ewma_experiment(suite, table, modes, {split, split_mode == "random", seed});
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const auto& row = result.rows[i];
      const auto& r = row.report;
      per_seed << seed << ',' << row.mode.name() << ','
               << (row.mode.kind == ColocationMode::Kind::Ewma ? csv::fmt(row.mode.alpha) : "")
               << ',' << csv::fmt(r.mse) << ',' << csv::fmt(r.rel_p25) << ','
               << csv::fmt(r.rel_p50) << ',' << csv::fmt(r.rel_p75) << ','
               << csv::fmt(r.rel_p95) << ',' << result.n_train << ',' << result.n_test << '\n';
      by_mode[i].push_back(r);
    }
  }
  write_file(out / "ewma_per_seed.csv", per_seed.str());

  std::ostringstream summary;
  summary << "mode,alpha,mean_mse,mean_rel_p25,mean_rel_p50,mean_rel_p75,mean_rel_p95,n_seeds\n";
  for (const auto& [i, reports] : by_mode) {
    double acc[5] = {};
    for (const auto& r : reports) {
      acc[0] += r.mse;
      acc[1] += r.rel_p25;
      acc[2] += r.rel_p50;
      acc[3] += r.rel_p75;
      acc[4] += r.rel_p95;
    }
    const double n = static_cast<double>(reports.size());
    summary << modes[i].name() << ','
            << (modes[i].kind == ColocationMode::Kind::Ewma ? csv::fmt(modes[i].alpha) : "");
    for (double a : acc) summary << ',' << csv::fmt(a / n);
    summary << ',' << reports.size() << '\n';
  }
  write_file(out / "ewma_report.csv", summary.str());
  std::cout << summary.str();
  write_manifest(out, "ewma-exp", config.dump(), seeds);
  return 0;
}

int cmd_drift(const Common& c, const std::string& base_path, DriftOptions options) {
  const auto table = load_table(c);
  const auto seeds = parse_seeds(c.seeds.empty() ? "1" : c.seeds);
  std::optional<ScenarioSpec> custom;
  if (!base_path.empty()) custom = load_scenario(base_path, table);

  nlohmann::json config;
  config["profiles_digest"] = table_digest(table);
  config["base"] = custom ? nlohmann::json::parse(scenario_to_json(*custom))
                          : nlohmann::json("builtin:drift");
  config["sgd_eta"] = options.sgd_eta;
  config["rls_lambda"] = options.rls_lambda;
  config["rls_delta"] = options.rls_delta;

  const fs::path out = c.out;
  fs::create_directories(out);
  std::ostringstream per_seed;
  per_seed << "seed," << kEvalCsvHeader << '\n';
  std::vector<std::string> datasets;
  std::map<std::string, std::array<double, 3>> sums;
  for (auto seed : seeds) {
    const auto base = custom ? reseeded(*custom, seed) : drift_base_scenario(table, seed);
    const auto result = run_drift_experiment(base, table, options);
    for (const auto& row : result.rows) {
      if (!sums.count(row.dataset)) datasets.push_back(row.dataset);
      auto& s = sums[row.dataset];
      s[0] += row.offline.mse;
      s[1] += row.sgd.mse;
      s[2] += row.rls.mse;
      for (const auto& [method, r] : {std::pair{"offline", &row.offline}, std::pair{"sgd", &row.sgd},
                                      std::pair{"rls", &row.rls}}) {
        per_seed << seed << ',';
        write_eval_row(per_seed, row.dataset, method, *r);
      }
    }
  }
  write_file(out / "drift_per_seed.csv", per_seed.str());

  std::ostringstream table_out;
  table_out << "dataset,offline_mse,sgd_mse,rls_mse,n_seeds\n";
  const double n = static_cast<double>(seeds.size());
  for (const auto& d : datasets) {
    const auto& s = sums[d];
    table_out << d << ',' << csv::fmt(s[0] / n) << ',' << csv::fmt(s[1] / n) << ','
              << csv::fmt(s[2] / n) << ',' << seeds.size() << '\n';
  }
  write_file(out / "drift_report.csv", table_out.str());
  std::cout << table_out.str();
  write_manifest(out, "drift-exp", config.dump(), seeds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intfsim: GPU inference-serving simulator with interference prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(INTFSIM_VERSION));

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_seeds) {
    sub->add_option("--profiles", common.profiles,
                    "Profile CSV (default: built-in synthetic profiles)");
    sub->add_option("--out", common.out, "Output directory (env INTFSIM_OUT_DIR, else ./out)")
        ->capture_default_str();
    if (with_seeds) {
      sub->add_option("--seeds", common.seeds,
                      "Seeds, e.g. 1,2,3 or 1-20 (simulate: default is the scenario's own seed; "
                      "experiments: default 1)");
    }
  };

  std::string gen_out = "profiles/default.csv";
  std::uint64_t gen_seed = kDefaultProfileSeed;
  auto* gen = app.add_subcommand("gen-profiles", "Write the synthetic profile table as CSV");
  gen->add_option("--out", gen_out, "Destination path, '-' for stdout")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Jitter seed")->capture_default_str();

  std::vector<std::string> scenarios;
  auto* val = app.add_subcommand("validate", "Validate a profile table and scenario files");
  add_common(val, false);
  val->add_option("--scenario", scenarios, "Scenario JSON file(s)");

  bool segments = false;
  bool arrivals = false;
  auto* sim = app.add_subcommand("simulate", "Run scenarios and write outcome/request/sample CSVs");
  add_common(sim, true);
  sim->add_option("--scenario", scenarios, "Scenario JSON file(s)")->required();
  sim->add_flag("--segments", segments, "Also write the per-segment co-location log");
  sim->add_flag("--arrivals", arrivals, "Also write the generated arrival trace");

  std::string alphas = "1/3,1/2,2/3";
  double split = 0.75;
  std::string split_mode = "chrono";
  auto* ewma = app.add_subcommand("ewma-exp", "Static vs EWMA co-location features (relative error)");
  add_common(ewma, true);
  ewma->add_option("--scenario", scenarios,
                   "Scenario JSON file(s) forming the suite (default: built-in high-churn suite)");
  ewma->add_option("--alphas", alphas, "EWMA smoothing factors")->capture_default_str();
  ewma->add_option("--split", split, "Training fraction")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  ewma->add_option("--split-mode", split_mode, "chrono or random")->capture_default_str();

  std::string base;
  DriftOptions drift_opts;
  auto* drift = app.add_subcommand("drift-exp", "Offline vs SGD vs RLS under workload drift (MSE)");
  add_common(drift, true);
  drift->add_option("--base", base, "Base scenario JSON with >= 4 models (default: built-in)");
  drift->add_option("--eta", drift_opts.sgd_eta, "SGD step size")->capture_default_str();
  drift->add_option("--lambda", drift_opts.rls_lambda, "RLS forgetting factor")->capture_default_str();
  drift->add_option("--delta", drift_opts.rls_delta, "RLS reset scale for P")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_profiles(gen_out, gen_seed);
    if (*val) return cmd_validate(common, scenarios);
    if (*sim) return cmd_simulate(common, scenarios, segments, arrivals);
    if (*ewma) return cmd_ewma(common, scenarios, alphas, split, split_mode);
    if (*drift) return cmd_drift(common, base, drift_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
