#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace intfsim {

struct RequestRecord {
  std::uint64_t request_id = 0;
  std::string model_id;
  double arrival_ms = 0.0;
  std::uint64_t batch_id = 0;
  double dispatch_ms = 0.0;
  double completion_ms = 0.0;
  double latency_ms = 0.0;    // completion - arrival
  double queueing_ms = 0.0;   // dispatch - arrival
  double slo_ms = 0.0;
  bool slo_met = false;
};

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value, with
/// p = 0 mapping to the minimum.
double percentile(std::span<const double> values, double p);

struct SloSummary {
  std::string model_id;
  std::size_t n_requests = 0;
  double satisfaction = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
};

struct SloReportOptions {
  // Requests arriving before warmup_fraction * (last arrival) are excluded.
  double warmup_fraction = 0.0;
};

/// Per-model SLO satisfaction and latency percentiles, ordered by model id.
std::vector<SloSummary> slo_report(std::span<const RequestRecord> records,
                                   SloReportOptions options = {});

/// p-th percentile of request latency over all models (after warm-up trim).
double latency_percentile(std::span<const RequestRecord> records, double p,
                          SloReportOptions options = {});

void write_requests_csv(std::span<const RequestRecord> records, std::ostream& out);
void write_slo_report_csv(std::span<const SloSummary> report, std::ostream& out);

}  // namespace intfsim
