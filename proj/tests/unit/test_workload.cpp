#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "intfsim/profile.hpp"
#include "intfsim/scenario_io.hpp"
#include "intfsim/workload.hpp"

using namespace intfsim;

namespace {

const ProfileTable& table() {
  static const auto t = gen_synthetic_profiles(default_synthesis_spec(), kDefaultProfileSeed);
  return t;
}

ScenarioSpec one_model(double rate, double duration_s, std::uint64_t seed) {
  ScenarioSpec s;
  s.deployed = {{"resnet50", rate, {}, {}, {}}};
  s.duration_s = duration_s;
  s.seed = seed;
  return resolve_defaults(s, table());
}

}  // namespace

TEST_CASE("zero rate yields no events for that model") {
  ScenarioSpec s;
  s.deployed = {{"resnet50", 0.0, {}, {}, {}}, {"vgg19", 50.0, {}, {}, {}}};
  s = resolve_defaults(s, table());
  for (const auto& e : generate_arrivals(s)) CHECK(e.model_id == "vgg19");
}

TEST_CASE("exponential inter-arrival statistics") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ev = generate_arrivals(one_model(100.0, 100.0, seed));
    std::vector<double> gaps;
    for (std::size_t i = 1; i < ev.size(); ++i)
      gaps.push_back(ev[i].arrival_time_ms - ev[i - 1].arrival_time_ms);
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    const double cv = std::sqrt(var / (gaps.size() - 1)) / mean;
    CHECK(std::abs(mean - 10.0) <= 0.5);
    CHECK(std::abs(cv - 1.0) <= 0.1);
  }
}

TEST_CASE("arrivals are deterministic, ordered and carry deadlines") {
  const auto spec = one_model(200.0, 2.0, 9);
  const auto a = generate_arrivals(spec);
  CHECK(a == generate_arrivals(spec));
  std::ostringstream x, y;
  write_arrivals_csv(a, x);
  write_arrivals_csv(generate_arrivals(spec), y);
  CHECK(x.str() == y.str());
  const double slo = 5.0 * table().at("resnet50", 1).solo_duration_ms;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].request_id == i);
    CHECK(a[i].arrival_time_ms < 2000.0);
    CHECK(a[i].deadline_ms == doctest::Approx(a[i].arrival_time_ms + slo));
    if (i) CHECK(a[i].arrival_time_ms >= a[i - 1].arrival_time_ms);
  }
  auto unresolved = spec;
  unresolved.deployed[0].slo_ms.reset();
  CHECK_THROWS_AS(generate_arrivals(unresolved), Error);
}

TEST_CASE("defaults and validation") {
  const double solo1 = table().at("vgg19", 1).solo_duration_ms;
  CHECK(default_slo_ms(table(), "vgg19") == doctest::Approx(5 * solo1));
  CHECK(default_window_ms(table(), "vgg19") == doctest::Approx(2 * solo1));

  ScenarioSpec s;
  CHECK_THROWS_AS(validate_scenario(s), Error);  // nothing deployed
  s.deployed = {{"vgg19", 10.0, {}, {}, {}}};
  CHECK_NOTHROW(validate_scenario(s, &table()));
  s.deployed[0].arrival_rate_rps = -1.0;
  CHECK_THROWS_AS(validate_scenario(s), Error);
  s.deployed[0] = {"unknown", 1.0, {}, {}, {}};
  CHECK_THROWS_AS(validate_scenario(s, &table()), Error);
  s.deployed = {{"vgg19", 1.0, {}, {}, {}}, {"vgg19", 1.0, {}, {}, {}}};
  CHECK_THROWS_AS(validate_scenario(s), Error);

  ScenarioSpec w;
  w.deployed = {{"vgg19", 1.0, {}, {}, {}}};
  w.batching_window_ms = 7.0;
  CHECK(*resolve_defaults(w, table()).deployed[0].batching_window_ms == 7.0);
}

TEST_CASE("utilization helper") {
  const auto& p = table().at("resnet50", 8);
  CHECK(rate_for_utilization(table(), "resnet50", 1.0) ==
        doctest::Approx(8.0 / (p.solo_duration_ms / 1000.0)));
  ScenarioSpec s;
  s.deployed = {{"resnet50", 0, {}, {}, {}}, {"vgg19", 0, {}, {}, {}}};
  apply_utilization(s, table(), 0.8);
  CHECK(s.deployed[0].arrival_rate_rps == doctest::Approx(rate_for_utilization(table(), "resnet50", 0.4)));
}

TEST_CASE("drift scenario sets") {
  ScenarioSpec base;
  for (const auto& m : table().models()) base.deployed.push_back({m, 10.0, {}, {}, {}});
  const auto d = drift_scenarios(base);
  auto ids = [](const ScenarioSpec& s) {
    std::set<std::string> out;
    for (const auto& m : s.deployed) out.insert(m.model_id);
    return out;
  };
  const auto s1 = ids(d.training), s2 = ids(d.test2);
  CHECK(s1.size() == 3);
  CHECK(s2.size() == 3);
  for (const auto& m : s1) CHECK(s2.count(m) == 0);
  CHECK(ids(d.test1) == s1);
  CHECK(ids(d.test3).size() == 6);
  // Test set 1 only changes the loads.
  for (std::size_t i = 0; i < d.test1.deployed.size(); ++i) {
    const double f = d.test1.deployed[i].arrival_rate_rps / d.training.deployed[i].arrival_rate_rps;
    CHECK((f == doctest::Approx(0.25) || f == doctest::Approx(4.0)));
  }
  std::set<std::uint64_t> seeds{d.training.seed, d.test1.seed, d.test2.seed, d.test3.seed};
  CHECK(seeds.size() == 4);

  ScenarioSpec small;
  small.deployed = {{"resnet50", 1, {}, {}, {}}, {"vgg19", 1, {}, {}, {}}};
  CHECK_THROWS_AS(drift_scenarios(small), Error);
}

TEST_CASE("scenario json round trip and errors") {
  const std::string text = R"({
    "name": "demo", "duration_s": 2.5, "concurrency_cap": 3, "seed": 11,
    "colocation_mode": "ewma", "alpha": 0.25,
    "oracle": {"noise_sigma": 0.0},
    "utilization": 0.6,
    "deployed": [{"model_id": "resnet50"}, {"model_id": "vgg19", "arrival_rate_rps": 40, "slo_ms": 90}]
  })";
  const auto s = parse_scenario(text, table());
  CHECK(s.name == "demo");
  CHECK(s.concurrency_cap == 3);
  CHECK(s.colocation_mode.alpha == 0.25);
  CHECK(s.oracle.noise_sigma == 0.0);
  CHECK(s.deployed[1].arrival_rate_rps == 40.0);
  CHECK(s.deployed[0].arrival_rate_rps ==
        doctest::Approx(rate_for_utilization(table(), "resnet50", 0.3)));
  const auto again = parse_scenario(scenario_to_json(s), table());
  CHECK(again.deployed[0].arrival_rate_rps == s.deployed[0].arrival_rate_rps);
  CHECK(again.oracle == s.oracle);

  CHECK_THROWS_AS(parse_scenario("{", table()), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"deployed": [], "bogus": 1})", table()), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"deployed": [{"model_id": "nope", "arrival_rate_rps": 1}]})", table()),
                  Error);
  CHECK_THROWS_AS(parse_scenario(R"({"colocation_mode": "ewma", "alpha": 0,
                                     "deployed": [{"model_id": "vgg19", "arrival_rate_rps": 1}]})",
                                 table()),
                  Error);
}
