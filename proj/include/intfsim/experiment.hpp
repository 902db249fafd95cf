#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "intfsim/colocation.hpp"
#include "intfsim/predict.hpp"
#include "intfsim/profile.hpp"
#include "intfsim/simcore.hpp"
#include "intfsim/workload.hpp"

namespace intfsim {

struct SplitOptions {
  double train_fraction = 0.75;
  bool random = false;  // chronological unless set
  std::uint64_t seed = 0;
};

/// Partitions samples into (train, test). Chronological keeps the order and
/// cuts at floor(fraction * n).
std::pair<std::vector<Sample>, std::vector<Sample>> split_samples(std::span<const Sample> samples,
                                                                  SplitOptions options = {});

// Built-in scenarios used by the experiments and the acceptance suite. All
// draw their models from the default synthetic archetypes.

/// `n_tasks` independent tasks of the lightweight archetype, sharing
/// `utilization` evenly, under the given concurrency cap.
ScenarioSpec concurrency_stress_scenario(const ProfileTable& table, int n_tasks, int cap,
                                         double utilization, std::uint64_t seed);

/// Two heavy archetypes driven past saturation so batches overlap throughout.
ScenarioSpec calibration_scenario(const ProfileTable& table, std::uint64_t seed);

/// Short-batch, high-load mixes in which most batches see several
/// co-location changes.
std::vector<ScenarioSpec> high_churn_suite(const ProfileTable& table, std::uint64_t seed);

/// Six-archetype base for the drift experiment; the first three form the
/// training set.
ScenarioSpec drift_base_scenario(const ProfileTable& table, std::uint64_t seed);

struct EwmaModeRow {
  ColocationMode mode;
  EvalReport report;
};

struct EwmaExperimentResult {
  std::vector<EwmaModeRow> rows;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Runs every scenario once, derives features for each mode from the same
/// batches, splits each scenario's samples, fits OLS on the pooled training
/// part and scores the pooled test part.
EwmaExperimentResult run_ewma_experiment(std::span<const ScenarioSpec> suite,
                                         const ProfileTable& table,
                                         std::span<const ColocationMode> modes,
                                         SplitOptions split = {});

struct DriftOptions {
  double sgd_eta = 0.01;
  double rls_lambda = 0.99;
  double rls_delta = 100.0;
};

struct DriftRow {
  std::string dataset;  // training, test1, test2, test3
  EvalReport offline;
  EvalReport sgd;
  EvalReport rls;
  std::size_t n_samples = 0;
};

struct DriftExperimentResult {
  std::vector<DriftRow> rows;  // training, test1, test2, test3
};

/// Fits OLS on the training scenario and scores each test scenario with the
/// frozen model and with SGD and RLS learners warm-started from it.
DriftExperimentResult run_drift_experiment(const ScenarioSpec& base, const ProfileTable& table,
                                           DriftOptions options = {});

}  // namespace intfsim
