#include <limits>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "intfsim/common.hpp"
#include "intfsim/metrics.hpp"

using namespace intfsim;

namespace {

RequestRecord rec(std::uint64_t id, const std::string& m, double arrival, double latency, double slo) {
  RequestRecord r;
  r.request_id = id;
  r.model_id = m;
  r.arrival_ms = arrival;
  r.dispatch_ms = arrival;
  r.completion_ms = arrival + latency;
  r.latency_ms = latency;
  r.slo_ms = slo;
  r.slo_met = latency <= slo;
  return r;
}

}  // namespace

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(percentile(v, 99) == 99);
  CHECK(percentile(v, 100) == 100);
  CHECK(percentile(v, 0) == 1);
  CHECK(percentile(std::vector<double>{5}, 37) == 5);
  CHECK(percentile(std::vector<double>{3, 1, 2}, 50) == 2);
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 50), Error);
  CHECK_THROWS_AS(percentile(v, 101), Error);
}

TEST_CASE("slo satisfaction") {
  std::vector<RequestRecord> all;
  for (int i = 0; i < 10; ++i) all.push_back(rec(i, "a", i, 5.0 + i, 100.0));
  auto rep = slo_report(all);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].satisfaction == 1.0);
  CHECK(rep[0].p50_ms == 9.0);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<RequestRecord> lax;
  for (int i = 0; i < 5; ++i) lax.push_back(rec(i, "b", i, 1e6, inf));
  CHECK(slo_report(lax)[0].satisfaction == 1.0);

  std::vector<RequestRecord> mixed{rec(0, "a", 0, 5, 10), rec(1, "a", 1, 15, 10),
                                   rec(2, "b", 2, 1, 10)};
  rep = slo_report(mixed);
  REQUIRE(rep.size() == 2);
  CHECK(rep[0].model_id == "a");
  CHECK(rep[0].satisfaction == 0.5);
  CHECK(rep[1].satisfaction == 1.0);
}

TEST_CASE("warm-up trimming") {
  std::vector<RequestRecord> r;
  for (int i = 0; i <= 10; ++i) r.push_back(rec(i, "a", i * 10.0, i < 2 ? 1000.0 : 1.0, 50));
  // Arrivals before 0.2 * 100 ms are dropped.
  CHECK(latency_percentile(r, 100, {0.2}) == 1.0);
  CHECK(latency_percentile(r, 100) == 1000.0);
  CHECK(slo_report(r, {0.2})[0].n_requests == 9);
}

TEST_CASE("csv writers") {
  std::vector<RequestRecord> r{rec(0, "a", 1.5, 2, 10)};
  std::ostringstream out;
  write_requests_csv(r, out);
  CHECK(out.str().find("request_id") == 0);
  CHECK(out.str().find("\n0,a,1.5,") != std::string::npos);
  std::ostringstream rep;
  write_slo_report_csv(slo_report(r), rep);
  CHECK(rep.str().find("\na,1,") != std::string::npos);
}
