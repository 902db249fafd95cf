#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "intfsim/colocation.hpp"
#include "intfsim/oracle.hpp"
#include "intfsim/profile.hpp"

namespace intfsim {

struct DeployedModel {
  std::string model_id;
  double arrival_rate_rps = 0.0;
  std::optional<double> slo_ms;              // default: 5 x solo(bs=1)
  std::optional<double> batching_window_ms;  // overrides the scenario window
  std::optional<std::string> profile;        // profiled model backing this task

  const std::string& profile_id() const { return profile ? *profile : model_id; }
};

struct ScenarioSpec {
  std::string name = "scenario";
  std::vector<DeployedModel> deployed;
  double duration_s = 10.0;
  std::optional<double> batching_window_ms;  // default: 2 x solo(bs=1) per model
  int max_batch_size = 8;
  int concurrency_cap = 2;
  std::uint64_t seed = 1;
  ColocationMode colocation_mode = ColocationMode::ewma(0.5);
  InterferenceOracle oracle;
};

/// Throws if the scenario is structurally invalid. With a table, also checks
/// that every deployed profile exists.
void validate_scenario(const ScenarioSpec& spec, const ProfileTable* table = nullptr);

/// Fills default SLOs and batching windows from the profile table.
ScenarioSpec resolve_defaults(ScenarioSpec spec, const ProfileTable& table);

double default_slo_ms(const ProfileTable& table, const std::string& profile_id);
double default_window_ms(const ProfileTable& table, const std::string& profile_id);

/// Arrival rate at which a model offers `rho` of the sequential capacity it
/// would reach running only full batches.
double rate_for_utilization(const ProfileTable& table, const std::string& profile_id, double rho);

/// Splits a total utilization `rho` evenly across the deployed models.
void apply_utilization(ScenarioSpec& spec, const ProfileTable& table, double rho);

struct RequestEvent {
  std::uint64_t request_id = 0;
  std::string model_id;
  double arrival_time_ms = 0.0;
  double deadline_ms = 0.0;

  friend bool operator==(const RequestEvent&, const RequestEvent&) = default;
};

/// Poisson arrivals per deployed model over [0, duration), merged by time.
/// Each model draws from its own seeded sub-stream. Requires resolved SLOs.
std::vector<RequestEvent> generate_arrivals(const ScenarioSpec& spec);

void write_arrivals_csv(const std::vector<RequestEvent>& events, std::ostream& out);

struct DriftScenarios {
  ScenarioSpec training;
  ScenarioSpec test1;  // same models, loads scaled by 0.25 / 4.0 alternately
  ScenarioSpec test2;  // disjoint model set
  ScenarioSpec test3;  // union of both sets
};

/// Splits the base's deployed models into a first half S1 and the rest S2.
DriftScenarios drift_scenarios(const ScenarioSpec& base);

}  // namespace intfsim
