#include "intfsim/colocation.hpp"

#include <cmath>
#include <ostream>

#include "intfsim/csv.hpp"

namespace intfsim {

ColocationMode ColocationMode::ewma(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("ewma alpha must lie in (0, 1]");
  return {Kind::Ewma, alpha};
}

std::string ColocationMode::name() const { return kind == Kind::Static ? "static" : "ewma"; }

std::array<ColocationMode, 4> reproduction_modes() {
  return {ColocationMode::static_snapshot(), ColocationMode::ewma(1.0 / 3.0),
          ColocationMode::ewma(1.0 / 2.0), ColocationMode::ewma(2.0 / 3.0)};
}

CoLocationEstimate init_estimate(std::uint64_t batch_id, ColocationMode mode,
                                 const Resources& colo_now) {
  if (!colo_now.non_negative()) throw Error("co-located throughput must be non-negative");
  return {batch_id, mode, colo_now, 1};
}

void observe(CoLocationEstimate& est, const Resources& x_t) {
  if (!x_t.non_negative()) throw Error("co-located throughput must be non-negative");
  if (est.mode.kind == ColocationMode::Kind::Static) return;
  const double a = est.mode.alpha;
  est.r_hat = a * x_t + (1.0 - a) * est.r_hat;
  ++est.n_observations;
}

FeatureVector finalize_features(const Resources& own, const CoLocationEstimate& est) {
  return {own.l2, own.dram, own.sm, est.r_hat.l2, est.r_hat.dram, est.r_hat.sm};
}

CoLocationEstimate replay_history(std::uint64_t batch_id, ColocationMode mode,
                                  std::span<const Resources> history) {
  if (history.empty()) return init_estimate(batch_id, mode, {});
  auto est = init_estimate(batch_id, mode, history.front());
  for (const auto& x : history.subspan(1)) observe(est, x);
  return est;
}

void write_samples_csv(std::span<const Sample> samples, const ColocationMode& mode,
                       std::ostream& out) {
  out << "batch_id,scenario,own_l2,own_dram,own_sm,colo_l2,colo_dram,colo_sm,y_ratio,mode,alpha\n";
  const std::string alpha =
      mode.kind == ColocationMode::Kind::Ewma ? csv::fmt(mode.alpha) : std::string();
  for (const auto& s : samples) {
    out << s.batch_id << ',' << s.scenario;
    for (double v : s.x) out << ',' << csv::fmt(v);
    out << ',' << csv::fmt(s.y) << ',' << mode.name() << ',' << alpha << '\n';
  }
}

}  // namespace intfsim
