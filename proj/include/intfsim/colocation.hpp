#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "intfsim/common.hpp"

namespace intfsim {

/// How a batch's co-located throughput feature is derived. Static keeps the
/// dispatch-time snapshot; Ewma smooths every later co-location change with
/// r <- alpha * x + (1 - alpha) * r.
struct ColocationMode {
  enum class Kind { Static, Ewma };
  Kind kind = Kind::Static;
  double alpha = 1.0;

  static ColocationMode static_snapshot() { return {Kind::Static, 1.0}; }
  static ColocationMode ewma(double alpha);

  std::string name() const;  // "static" or "ewma"
  friend bool operator==(const ColocationMode&, const ColocationMode&) = default;
};

/// Static, EWMA(1/3), EWMA(1/2), EWMA(2/3).
std::array<ColocationMode, 4> reproduction_modes();

struct CoLocationEstimate {
  std::uint64_t batch_id = 0;
  ColocationMode mode;
  Resources r_hat;
  int n_observations = 0;
};

CoLocationEstimate init_estimate(std::uint64_t batch_id, ColocationMode mode,
                                 const Resources& colo_now);

/// Call once per change of the batch's co-located set with the new sums.
void observe(CoLocationEstimate& est, const Resources& x_t);

using FeatureVector = std::array<double, 6>;

/// (own l2, dram, sm, colo l2, dram, sm).
FeatureVector finalize_features(const Resources& own, const CoLocationEstimate& est);

/// Predictor training example: features plus the measured interference ratio.
struct Sample {
  FeatureVector x{};
  double y = 1.0;
  std::uint64_t batch_id = 0;
  std::string scenario;
};

/// Replays a batch's co-location history (one entry per segment, dispatch
/// snapshot first) through an estimate of the given mode.
CoLocationEstimate replay_history(std::uint64_t batch_id, ColocationMode mode,
                                  std::span<const Resources> history);

void write_samples_csv(std::span<const Sample> samples, const ColocationMode& mode,
                       std::ostream& out);

}  // namespace intfsim
