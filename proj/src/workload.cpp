#include "intfsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include "intfsim/csv.hpp"

namespace intfsim {

void validate_scenario(const ScenarioSpec& spec, const ProfileTable* table) {
  const std::string where = "scenario '" + spec.name + "': ";
  if (spec.deployed.empty()) throw Error(where + "no deployed models");
  if (!(spec.duration_s > 0.0) || !std::isfinite(spec.duration_s)) {
    throw Error(where + "duration_s must be positive and finite");
  }
  if (spec.batching_window_ms && !(*spec.batching_window_ms >= 0.0)) {
    throw Error(where + "batching_window_ms must be non-negative");
  }
  if (spec.max_batch_size < 1) throw Error(where + "max_batch_size must be positive");
  if (spec.concurrency_cap < 1) throw Error(where + "concurrency_cap must be positive");
  const auto& o = spec.oracle;
  if (o.beta_l2 < 0 || o.beta_dram < 0 || o.beta_sm < 0 || o.noise_sigma < 0) {
    throw Error(where + "oracle parameters must be non-negative");
  }
  std::set<std::string> ids;
  for (const auto& m : spec.deployed) {
    if (!ids.insert(m.model_id).second) throw Error(where + "duplicate model " + m.model_id);
    if (!(m.arrival_rate_rps >= 0.0) || !std::isfinite(m.arrival_rate_rps)) {
      throw Error(where + m.model_id + ": arrival_rate_rps must be non-negative");
    }
    if (m.slo_ms && !(*m.slo_ms > 0.0)) throw Error(where + m.model_id + ": slo_ms must be > 0");
    if (m.batching_window_ms && !(*m.batching_window_ms >= 0.0)) {
      throw Error(where + m.model_id + ": batching_window_ms must be non-negative");
    }
    if (table && !table->has_model(m.profile_id())) {
      throw Error(where + "unknown model " + m.profile_id());
    }
  }
  if (table && table->max_batch_size() < spec.max_batch_size) {
    throw Error(where + "profile table covers batch sizes only up to " +
                std::to_string(table->max_batch_size()));
  }
}

double default_slo_ms(const ProfileTable& table, const std::string& profile_id) {
  return 5.0 * table.at(profile_id, 1).solo_duration_ms;
}

double default_window_ms(const ProfileTable& table, const std::string& profile_id) {
  return 2.0 * table.at(profile_id, 1).solo_duration_ms;
}

ScenarioSpec resolve_defaults(ScenarioSpec spec, const ProfileTable& table) {
  validate_scenario(spec, &table);
  for (auto& m : spec.deployed) {
    if (!m.slo_ms) m.slo_ms = default_slo_ms(table, m.profile_id());
    if (!m.batching_window_ms) {
      m.batching_window_ms = spec.batching_window_ms ? *spec.batching_window_ms
                                                     : default_window_ms(table, m.profile_id());
    }
  }
  return spec;
}

double rate_for_utilization(const ProfileTable& table, const std::string& profile_id,
                            double rho) {
  const int bs = table.max_batch_size();
  return rho * bs / (table.at(profile_id, bs).solo_duration_ms / 1000.0);
}

void apply_utilization(ScenarioSpec& spec, const ProfileTable& table, double rho) {
  if (spec.deployed.empty()) return;
  const double share = rho / static_cast<double>(spec.deployed.size());
  for (auto& m : spec.deployed) m.arrival_rate_rps = rate_for_utilization(table, m.profile_id(), share);
}

std::vector<RequestEvent> generate_arrivals(const ScenarioSpec& spec) {
  validate_scenario(spec);
  struct Tagged {
    double t;
    std::size_t model;
  };
  std::vector<Tagged> all;
  const double horizon_ms = spec.duration_s * 1000.0;
  for (std::size_t i = 0; i < spec.deployed.size(); ++i) {
    const auto& m = spec.deployed[i];
    if (!m.slo_ms) throw Error("generate_arrivals: unresolved SLO for " + m.model_id);
    if (m.arrival_rate_rps <= 0.0) continue;
    std::mt19937_64 rng(derive_seed(spec.seed, fnv1a(m.model_id)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double mean_gap_ms = 1000.0 / m.arrival_rate_rps;
    double t = 0.0;
    while (true) {
      t += -std::log1p(-unit(rng)) * mean_gap_ms;  // inverse CDF of Exp
      if (t >= horizon_ms) break;
      all.push_back({t, i});
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return a.t != b.t ? a.t < b.t : a.model < b.model;
  });
  std::vector<RequestEvent> out;
  out.reserve(all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto& m = spec.deployed[all[k].model];
    out.push_back({k, m.model_id, all[k].t, all[k].t + *m.slo_ms});
  }
  return out;
}

void write_arrivals_csv(const std::vector<RequestEvent>& events, std::ostream& out) {
  out << "request_id,model_id,arrival_time_ms,deadline_ms\n";
  for (const auto& e : events) {
    out << e.request_id << ',' << e.model_id << ',' << csv::fmt(e.arrival_time_ms) << ','
        << csv::fmt(e.deadline_ms) << '\n';
  }
}

DriftScenarios drift_scenarios(const ScenarioSpec& base) {
  validate_scenario(base);
  const std::size_t n = base.deployed.size();
  if (n < 4) {
    throw Error("drift scenarios need at least 4 deployed archetypes, got " + std::to_string(n));
  }
  const std::size_t n1 = n / 2;
  auto derived = [&](const std::string& suffix, std::uint64_t k) {
    ScenarioSpec s = base;
    s.name = base.name + "/" + suffix;
    s.seed = derive_seed(base.seed, k);
    s.oracle.seed = derive_seed(base.oracle.seed, k);
    s.deployed.clear();
    return s;
  };
  DriftScenarios d{derived("training", 0), derived("test1", 1), derived("test2", 2),
                   derived("test3", 3)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = base.deployed[i];
    if (i < n1) {
      d.training.deployed.push_back(m);
      auto scaled = m;
      scaled.arrival_rate_rps *= (i % 2 == 0) ? 0.25 : 4.0;
      d.test1.deployed.push_back(scaled);
    } else {
      d.test2.deployed.push_back(m);
    }
    auto shared = m;
    shared.arrival_rate_rps *= static_cast<double>(n1) / static_cast<double>(n);
    d.test3.deployed.push_back(shared);
  }
  return d;
}

}  // namespace intfsim
