#include "intfsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace intfsim {

std::pair<std::vector<Sample>, std::vector<Sample>> split_samples(std::span<const Sample> samples,
                                                                  SplitOptions options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw Error("split fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.random) {
    std::mt19937_64 rng(derive_seed(options.seed, 0x5b117));
    std::shuffle(order.begin(), order.end(), rng);
  }
  const auto cut = static_cast<std::size_t>(
      std::floor(options.train_fraction * static_cast<double>(samples.size())));
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? out.first : out.second).push_back(samples[order[i]]);
  }
  return out;
}

namespace {

ScenarioSpec base_spec(const std::string& name, std::uint64_t seed, double duration_s) {
  ScenarioSpec s;
  s.name = name;
  s.seed = seed;
  s.duration_s = duration_s;
  s.oracle.seed = derive_seed(seed, fnv1a(name));
  return s;
}

ScenarioSpec mix(const ProfileTable& table, const std::string& name,
                 const std::vector<std::string>& models, double utilization, double duration_s,
                 std::uint64_t seed) {
  auto s = base_spec(name, seed, duration_s);
  for (const auto& m : models) s.deployed.push_back({m, 0.0, {}, {}, {}});
  apply_utilization(s, table, utilization);
  return s;
}

}  // namespace

ScenarioSpec concurrency_stress_scenario(const ProfileTable& table, int n_tasks, int cap,
                                         double utilization, std::uint64_t seed) {
  if (n_tasks < 1) throw Error("need at least one task");
  auto s = base_spec("stress_resnet50_x" + std::to_string(n_tasks), seed, 20.0);
  s.concurrency_cap = cap;
  for (int i = 0; i < n_tasks; ++i) {
    s.deployed.push_back({"resnet50_t" + std::to_string(i), 0.0, {}, {}, std::string("resnet50")});
  }
  apply_utilization(s, table, utilization);
  return s;
}

ScenarioSpec calibration_scenario(const ProfileTable& table, std::uint64_t seed) {
  return mix(table, "calibration_heavy_pair", {"roberta_b", "vgg19"}, 3.0, 20.0, seed);
}

std::vector<ScenarioSpec> high_churn_suite(const ProfileTable& table, std::uint64_t seed) {
  return {
      mix(table, "churn_mix_a", {"resnet50", "yolov8n", "vgg19", "roberta_b"}, 0.95, 20.0,
          derive_seed(seed, 1)),
      mix(table, "churn_mix_b", {"vgg19", "convnext_b", "yolov8n", "vit_b16"}, 1.0, 20.0,
          derive_seed(seed, 2)),
      mix(table, "churn_mix_c",
          {"resnet50", "yolov8n", "roberta_b", "vit_b16", "vgg19", "convnext_b"}, 0.9, 20.0,
          derive_seed(seed, 3)),
  };
}

ScenarioSpec drift_base_scenario(const ProfileTable& table, std::uint64_t seed) {
  auto s = base_spec("drift", seed, 30.0);
  const std::pair<const char*, double> models[] = {
      {"resnet50", 0.15}, {"vgg19", 0.15}, {"roberta_b", 0.15},
      {"yolov8n", 0.25},  {"vit_b16", 0.25}, {"convnext_b", 0.25}};
  for (const auto& [m, rho] : models) {
    s.deployed.push_back({m, rate_for_utilization(table, m, rho), {}, {}, {}});
  }
  return s;
}

EwmaExperimentResult run_ewma_experiment(std::span<const ScenarioSpec> suite,
                                         const ProfileTable& table,
                                         std::span<const ColocationMode> modes,
                                         SplitOptions split) {
  if (suite.empty()) throw Error("ewma experiment needs at least one scenario");
  std::vector<RunResult> runs;
  runs.reserve(suite.size());
  for (const auto& spec : suite) runs.push_back(run_scenario(spec, table));

  EwmaExperimentResult result;
  for (const auto& mode : modes) {
    std::vector<Sample> train, test;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto samples = samples_for_mode(runs[i].outcomes, mode, suite[i].name);
      auto [tr, te] = split_samples(samples, split);
      train.insert(train.end(), tr.begin(), tr.end());
      test.insert(test.end(), te.begin(), te.end());
    }
    if (train.size() < static_cast<std::size_t>(kNumParams) || test.empty()) {
      throw Error("ewma experiment: too few samples to split (" + std::to_string(train.size()) +
                  " train, " + std::to_string(test.size()) + " test)");
    }
    Predictor model = fit_ols(train);
    result.rows.push_back({mode, evaluate(model, test, false)});
    result.n_train = train.size();
    result.n_test = test.size();
  }
  return result;
}

DriftExperimentResult run_drift_experiment(const ScenarioSpec& base, const ProfileTable& table,
                                           DriftOptions options) {
  const auto sets = drift_scenarios(base);
  const auto training = run_scenario(sets.training, table).samples;
  const auto fit = fit_ols_detailed(training);

  DriftExperimentResult result;
  {
    Predictor frozen = fit.model;
    const auto r = evaluate(frozen, training, false);
    // All three methods start from the same parameters, so scoring the
    // training data without updates gives one shared row.
    result.rows.push_back({"training", r, r, r, training.size()});
  }
  const std::pair<const char*, const ScenarioSpec*> tests[] = {
      {"test1", &sets.test1}, {"test2", &sets.test2}, {"test3", &sets.test3}};
  for (const auto& [name, spec] : tests) {
    const auto samples = run_scenario(*spec, table).samples;
    Predictor offline = fit.model;
    Predictor sgd = SgdState{fit.model, options.sgd_eta};
    Predictor rls = rls_warm_start(fit, options.rls_lambda, options.rls_delta);
    DriftRow row;
    row.dataset = name;
    row.offline = evaluate(offline, samples, false);
    row.sgd = evaluate(sgd, samples, true);
    row.rls = evaluate(rls, samples, true);
    row.n_samples = samples.size();
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace intfsim
