#pragma once

#include <filesystem>
#include <string>

#include "intfsim/profile.hpp"
#include "intfsim/workload.hpp"

namespace intfsim {

// Scenario files are JSON objects whose keys mirror ScenarioSpec:
//
//   name, duration_s, batching_window_ms, max_batch_size, concurrency_cap,
//   seed, colocation_mode ("static" | "ewma"), alpha,
//   oracle {beta_l2, beta_dram, beta_sm, noise_sigma, seed},
//   utilization, deployed [{model_id, arrival_rate_rps, slo_ms,
//                           batching_window_ms, profile}]
//
// `utilization` assigns an even share of the given load to every deployed
// model that has no explicit arrival_rate_rps. Unknown keys are rejected.

ScenarioSpec parse_scenario(const std::string& json_text, const ProfileTable& table);
ScenarioSpec load_scenario(const std::filesystem::path& path, const ProfileTable& table);
std::string scenario_to_json(const ScenarioSpec& spec);

}  // namespace intfsim
