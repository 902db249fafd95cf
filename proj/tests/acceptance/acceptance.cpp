// Acceptance gate: runs each criterion, prints one PASS/FAIL line per
// criterion and exits non-zero if any fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "intfsim/experiment.hpp"

using namespace intfsim;

namespace {

constexpr double kRlsOlsTol = 1e-8;
constexpr double kEwmaTol = 1e-12;
constexpr double kConservationRelTol = 1e-6;
constexpr int kSeeds = 20;
constexpr int kFig3Required = 18;
constexpr int kMedianRequired = 18;
constexpr int kTailRequired = 15;
constexpr double kCalibrationLo = 1.4;
constexpr double kCalibrationHi = 1.6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Normal equations solved by Gauss-Jordan elimination with partial pivoting,
// kept independent of the library's linear algebra.
std::vector<double> normal_equations_ols(const std::vector<Sample>& samples) {
  const int d = kNumParams;
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (const auto& s : samples) {
    double z[kNumParams];
    for (int i = 0; i < kNumFeatures; ++i) z[i] = s.x[i];
    z[kNumFeatures] = 1.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a[i][j] += z[i] * z[j];
      a[i][d] += z[i] * s.y;
    }
  }
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> theta(d);
  for (int i = 0; i < d; ++i) theta[i] = a[i][d] / a[i][i];
  return theta;
}

Outcome rls_matches_ols() {
  std::mt19937_64 rng(7001);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::uniform_int_distribution<int> size(20, 500);
  double worst = 0.0;
  for (int ds = 0; ds < 50; ++ds) {
    const int n = size(rng);
    std::array<double, 6> w{};
    for (auto& v : w) v = u01(rng) * 2.0 - 1.0;
    const double b = 1.0 + u01(rng);
    std::vector<Sample> samples(n);
    for (auto& s : samples) {
      s.y = b + noise(rng);
      for (int i = 0; i < 6; ++i) {
        s.x[i] = u01(rng) * 1.2;
        s.y += w[i] * s.x[i];
      }
    }
    // Warm start exactly on the first k samples, then stream the rest with
    // no forgetting.
    const int k = 10;
    std::vector<Sample> head(samples.begin(), samples.begin() + k);
    RlsState rls = rls_warm_start(fit_ols_detailed(head), 1.0);
    for (int i = k; i < n; ++i) rls_update(rls, samples[i]);
    const auto oracle = normal_equations_ols(samples);
    const auto got = rls.model.params();
    for (int i = 0; i < kNumParams; ++i) {
      const double diff = std::abs(got[i] - oracle[i]);
      worst = std::max(worst, diff);
    }
    if (rls.resets != 0) return {false, "unexpected P reset on dataset " + std::to_string(ds)};
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |theta_rls - theta_ols| = %.3e over 50 datasets", worst);
  return {worst <= kRlsOlsTol, buf};
}

Outcome ewma_closed_form() {
  std::mt19937_64 rng(7002);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 40);
  double worst = 0.0;
  const double alphas[] = {1.0 / 3.0, 1.0 / 2.0, 2.0 / 3.0};
  for (int stream = 0; stream < 10000; ++stream) {
    const double a = alphas[stream % 3];
    const int t = len(rng);
    std::vector<Resources> xs(t);
    for (auto& x : xs) x = {u01(rng), u01(rng), u01(rng)};
    auto est = init_estimate(stream, ColocationMode::ewma(a), xs[0]);
    for (int i = 1; i < t; ++i) observe(est, xs[i]);
    // r_T = (1-a)^(T-1) x_0 + sum_{i>=1} a (1-a)^(T-1-i) x_i
    double closed[3] = {0, 0, 0};
    for (int i = 0; i < t; ++i) {
      const double wgt = i == 0 ? std::pow(1.0 - a, t - 1) : a * std::pow(1.0 - a, t - 1 - i);
      closed[0] += wgt * xs[i].l2;
      closed[1] += wgt * xs[i].dram;
      closed[2] += wgt * xs[i].sm;
    }
    worst = std::max({worst, std::abs(est.r_hat.l2 - closed[0]),
                      std::abs(est.r_hat.dram - closed[1]), std::abs(est.r_hat.sm - closed[2])});
  }
  // Geometric convergence: a constant input c from r_0 = 0 gives
  // r_T = c (1 - (1-a)^T).
  for (double a : alphas) {
    auto est = init_estimate(0, ColocationMode::ewma(a), {0, 0, 0});
    for (int i = 1; i <= 30; ++i) {
      observe(est, {1, 1, 1});
      worst = std::max(worst, std::abs(est.r_hat.l2 - (1.0 - std::pow(1.0 - a, i))));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max closed-form deviation = %.3e over 10^4 streams", worst);
  return {worst <= kEwmaTol, buf};
}

Outcome conservation(const ProfileTable& table) {
  std::mt19937_64 rng(7003);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto models = table.models();
  double worst_rel = 0.0;
  int ratio_violations = 0, cap_violations = 0;
  std::size_t batches = 0;
  for (int sc = 0; sc < 100; ++sc) {
    ScenarioSpec spec;
    spec.name = "conservation_" + std::to_string(sc);
    spec.duration_s = 1.0 + 2.0 * u01(rng);
    spec.seed = rng();
    spec.oracle.noise_sigma = 0.0;
    spec.concurrency_cap = sc < 25 ? 1 : 1 + static_cast<int>(u01(rng) * 4);
    const int n = 1 + static_cast<int>(u01(rng) * 4);
    std::set<std::string> used;
    while (static_cast<int>(used.size()) < n) used.insert(models[rng() % models.size()]);
    for (const auto& m : used) spec.deployed.push_back({m, 0.0, {}, {}, {}});
    apply_utilization(spec, table, 0.3 + 1.2 * u01(rng));
    if (u01(rng) < 0.5) spec.batching_window_ms = 0.5 + 10.0 * u01(rng);

    const auto r = run_scenario(spec, table);
    std::vector<std::pair<double, int>> edges;
    for (const auto& o : r.outcomes) {
      ++batches;
      double work = 0.0;
      for (const auto& s : o.segments) work += (s.t_end_ms - s.t_begin_ms) / s.slowdown;
      worst_rel = std::max(worst_rel, std::abs(work - o.profiled_ms) / o.profiled_ms);
      if (spec.concurrency_cap == 1 && o.interference_ratio != 1.0) ++ratio_violations;
      edges.push_back({o.start_ms, +1});
      edges.push_back({o.completion_time_ms, -1});
    }
    // Completions at an instant are processed before starts at that instant.
    std::sort(edges.begin(), edges.end());
    int live = 0;
    for (const auto& e : edges) {
      live += e.second;
      if (live > spec.concurrency_cap) {
        ++cap_violations;
        break;
      }
    }
    if (r.peak_running > spec.concurrency_cap) ++cap_violations;
  }
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "%zu batches: max work rel err %.3e, cap-1 ratio violations %d, cap violations %d",
                batches, worst_rel, ratio_violations, cap_violations);
  return {worst_rel <= kConservationRelTol && ratio_violations == 0 && cap_violations == 0, buf};
}

Outcome concurrency_tail(const ProfileTable& table) {
  int ok = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const int n_tasks = 2 + s % 4;
    const auto a = run_scenario(concurrency_stress_scenario(table, n_tasks, 1, 0.9, s), table);
    const auto b = run_scenario(concurrency_stress_scenario(table, n_tasks, 2, 0.9, s), table);
    if (latency_percentile(b.requests, 99) <= latency_percentile(a.requests, 99)) ++ok;
  }
  return {ok >= kFig3Required,
          std::to_string(ok) + "/20 seeds with p99(cap 2) <= p99(cap 1), need " +
              std::to_string(kFig3Required)};
}

Outcome ewma_vs_static(const ProfileTable& table) {
  const auto modes = reproduction_modes();
  int median_ok = 0, tail_ok = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto r = run_ewma_experiment(high_churn_suite(table, s), table, modes);
    const auto& st = r.rows[0].report;
    const auto& half = r.rows[2].report;
    if (half.rel_p50 <= st.rel_p50) ++median_ok;
    if (st.rel_p95 > half.rel_p95) ++tail_ok;
  }
  return {median_ok >= kMedianRequired && tail_ok >= kTailRequired,
          "median EWMA(1/2) <= static in " + std::to_string(median_ok) +
              "/20, static p95 heavier in " + std::to_string(tail_ok) + "/20"};
}

Outcome drift_ordering(const ProfileTable& table) {
  double mean[4][3] = {};
  bool training_identical = true;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto r = run_drift_experiment(drift_base_scenario(table, s), table);
    const auto& tr = r.rows[0];
    if (!(tr.offline.mse == tr.sgd.mse && tr.sgd.mse == tr.rls.mse)) training_identical = false;
    for (int i = 0; i < 4; ++i) {
      mean[i][0] += r.rows[i].offline.mse / kSeeds;
      mean[i][1] += r.rows[i].sgd.mse / kSeeds;
      mean[i][2] += r.rows[i].rls.mse / kSeeds;
    }
  }
  const bool b = mean[2][2] <= mean[2][1] && mean[2][1] <= mean[2][0] &&
                 mean[3][2] <= mean[3][1] && mean[3][1] <= mean[3][0];
  const bool c = mean[3][0] < mean[2][0] && mean[3][1] < mean[2][1] && mean[3][2] < mean[2][2];
  bool d = true;
  for (int m = 1; m <= 2; ++m) d = d && (mean[1][0] - mean[1][m]) < (mean[2][0] - mean[2][m]);
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "(a)%s (b)%s (c)%s (d)%s; mean MSE off/sgd/rls test1 %.5f/%.5f/%.5f "
                "test2 %.5f/%.5f/%.5f test3 %.5f/%.5f/%.5f",
                training_identical ? "ok" : "no", b ? "ok" : "no", c ? "ok" : "no",
                d ? "ok" : "no", mean[1][0], mean[1][1], mean[1][2], mean[2][0], mean[2][1],
                mean[2][2], mean[3][0], mean[3][1], mean[3][2]);
  return {training_identical && b && c && d, buf};
}

Outcome calibration(const ProfileTable& table) {
  const auto r = run_scenario(calibration_scenario(table, 1), table);
  std::vector<double> ratios;
  for (const auto& o : r.outcomes) ratios.push_back(o.interference_ratio);
  const double p95 = percentile(ratios, 95);
  char buf[128];
  std::snprintf(buf, sizeof buf, "p95 interference ratio %.4f over %zu batches", p95,
                ratios.size());
  return {p95 >= kCalibrationLo && p95 <= kCalibrationHi, buf};
}

Outcome batching_invariants() {
  std::mt19937_64 rng(7008);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::string names[] = {"a", "b", "c"};
  long violations = 0;
  std::size_t requests = 0;
  for (int seq = 0; seq < 100000; ++seq) {
    const int n_models = 1 + static_cast<int>(rng() % 3);
    const int max_bs = 1 + static_cast<int>(rng() % 8);
    std::vector<PendingQueue> queues(n_models);
    for (int m = 0; m < n_models; ++m) {
      queues[m].model_id = names[m];
      queues[m].batching_window_ms = u01(rng) < 0.1 ? 0.0 : 5.0 * u01(rng);
      queues[m].max_batch_size = max_bs;
    }
    BatchIdSource ids;
    std::vector<BatchRequest> batches;
    auto keep = [&](std::optional<BatchRequest> b) {
      if (b) batches.push_back(std::move(*b));
    };
    // Polls every queue whose window expires no later than t, in deadline order.
    auto poll_until = [&](double t) {
      for (;;) {
        int next = -1;
        for (int m = 0; m < n_models; ++m) {
          const auto& dl = queues[m].window_deadline_ms;
          if (dl && *dl <= t && (next < 0 || *dl < *queues[next].window_deadline_ms)) next = m;
        }
        if (next < 0) return;
        keep(poll_window(queues[next], *queues[next].window_deadline_ms, ids));
      }
    };
    const int n_req = 1 + static_cast<int>(rng() % 30);
    double t = 0.0;
    std::map<std::uint64_t, RequestEvent> sent;
    for (int i = 0; i < n_req; ++i) {
      t += u01(rng) < 0.3 ? 0.0 : -std::log(1.0 - u01(rng)) * 1.5;
      poll_until(t);
      RequestEvent ev{static_cast<std::uint64_t>(i), names[rng() % n_models], t, t + 100.0};
      sent[ev.request_id] = ev;
      const auto m = static_cast<std::size_t>(ev.model_id[0] - 'a');
      keep(enqueue(queues[m], ev, t, ids));
      // Spurious early polls must not cut anything.
      if (u01(rng) < 0.2) keep(poll_window(queues[rng() % n_models], t, ids));
    }
    poll_until(1e300);
    requests += sent.size();

    std::set<std::uint64_t> seen;
    for (const auto& b : batches) {
      if (b.batch_size() < 1 || b.batch_size() > max_bs || b.batch_size() > 8) ++violations;
      for (const auto& r : b.members) {
        if (r.model_id != b.model_id) ++violations;
        if (!seen.insert(r.request_id).second) ++violations;
        const auto& q = queues[static_cast<std::size_t>(b.model_id[0] - 'a')];
        if (b.formed_at_ms - r.arrival_time_ms > q.batching_window_ms + 1e-9) ++violations;
        if (b.formed_at_ms < r.arrival_time_ms) ++violations;
      }
    }
    if (seen.size() != sent.size()) ++violations;
    for (const auto& q : queues)
      if (!q.waiting.empty()) ++violations;
  }
  return {violations == 0, std::to_string(requests) + " requests over 10^5 sequences, " +
                               std::to_string(violations) + " violations"};
}

}  // namespace

int main() {
  const auto table = gen_synthetic_profiles(default_synthesis_spec(), kDefaultProfileSeed);

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"rls_ols_equivalence", 10, rls_matches_ols},
      {"ewma_closed_form", 5, ewma_closed_form},
      {"simulator_conservation", 60, [&] { return conservation(table); }},
      {"concurrency_tail_latency", 120, [&] { return concurrency_tail(table); }},
      {"ewma_vs_static_error", 180, [&] { return ewma_vs_static(table); }},
      {"drift_mse_ordering", 300, [&] { return drift_ordering(table); }},
      {"oracle_calibration", 60, [&] { return calibration(table); }},
      {"batching_invariants", 30, batching_invariants},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %-26s %7.2fs (limit %gs) %s%s\n", pass ? "PASS" : "FAIL", c.name, secs,
                c.budget_s, o.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
