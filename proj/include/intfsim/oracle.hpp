#pragma once

#include <cstdint>

#include "intfsim/common.hpp"

namespace intfsim {

/// Ground-truth contention model standing in for real hardware.
/// Each resource contributes beta * max(0, own + colo - 1), i.e. only the
/// demand in excess of unit capacity slows a batch down.
struct InterferenceOracle {
  double beta_l2 = 1.0;
  double beta_dram = 1.5;
  double beta_sm = 0.5;
  double noise_sigma = 0.05;  // lognormal multiplicative noise scale
  std::uint64_t seed = 0;

  friend bool operator==(const InterferenceOracle&, const InterferenceOracle&) = default;
};

/// Slowdown factor for a batch with throughputs `own` running next to peers
/// whose throughputs sum to `colo_sum`. `noise_draw` multiplies the result.
double oracle_slowdown(const Resources& own, const Resources& colo_sum,
                       const InterferenceOracle& oracle, double noise_draw = 1.0);

/// Lognormal(0, sigma^2) draw fixed per (oracle seed, batch, segment).
double oracle_noise(const InterferenceOracle& oracle, std::uint64_t batch_id,
                    std::uint64_t segment_index);

}  // namespace intfsim
