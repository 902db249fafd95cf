#include "intfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "intfsim/common.hpp"
#include "intfsim/csv.hpp"

namespace intfsim {

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw Error("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw Error("percentile rank outside [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

namespace {

std::vector<const RequestRecord*> trimmed(std::span<const RequestRecord> records,
                                          const SloReportOptions& options) {
  if (records.empty()) throw Error("slo report over no requests");
  double last = 0.0;
  for (const auto& r : records) last = std::max(last, r.arrival_ms);
  const double cutoff = options.warmup_fraction * last;
  std::vector<const RequestRecord*> out;
  for (const auto& r : records) {
    if (r.arrival_ms >= cutoff) out.push_back(&r);
  }
  if (out.empty()) throw Error("warm-up trimming removed every request");
  return out;
}

}  // namespace

std::vector<SloSummary> slo_report(std::span<const RequestRecord> records,
                                   SloReportOptions options) {
  std::map<std::string, std::vector<const RequestRecord*>> by_model;
  for (const auto* r : trimmed(records, options)) by_model[r->model_id].push_back(r);

  std::vector<SloSummary> out;
  for (const auto& [model, recs] : by_model) {
    std::vector<double> lat;
    std::size_t met = 0;
    for (const auto* r : recs) {
      lat.push_back(r->latency_ms);
      met += r->slo_met ? 1 : 0;
    }
    out.push_back({model, recs.size(), static_cast<double>(met) / recs.size(),
                   percentile(lat, 50), percentile(lat, 95), percentile(lat, 99)});
  }
  return out;
}

double latency_percentile(std::span<const RequestRecord> records, double p,
                          SloReportOptions options) {
  std::vector<double> lat;
  for (const auto* r : trimmed(records, options)) lat.push_back(r->latency_ms);
  return percentile(lat, p);
}

void write_requests_csv(std::span<const RequestRecord> records, std::ostream& out) {
  out << "request_id,model_id,arrival_ms,dispatch_ms,completion_ms,latency_ms,queueing_ms,slo_met\n";
  for (const auto& r : records) {
    out << r.request_id << ',' << r.model_id << ',' << csv::fmt(r.arrival_ms) << ','
        << csv::fmt(r.dispatch_ms) << ',' << csv::fmt(r.completion_ms) << ','
        << csv::fmt(r.latency_ms) << ',' << csv::fmt(r.queueing_ms) << ','
        << (r.slo_met ? 1 : 0) << '\n';
  }
}

void write_slo_report_csv(std::span<const SloSummary> report, std::ostream& out) {
  out << "model_id,n_requests,slo_satisfaction,p50_ms,p95_ms,p99_ms\n";
  for (const auto& s : report) {
    out << s.model_id << ',' << s.n_requests << ',' << csv::fmt(s.satisfaction) << ','
        << csv::fmt(s.p50_ms) << ',' << csv::fmt(s.p95_ms) << ',' << csv::fmt(s.p99_ms) << '\n';
  }
}

}  // namespace intfsim
