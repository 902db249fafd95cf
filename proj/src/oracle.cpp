#include "intfsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace intfsim {

double oracle_slowdown(const Resources& own, const Resources& colo_sum,
                       const InterferenceOracle& oracle, double noise_draw) {
  auto excess = [](double a, double b) { return std::max(0.0, a + b - 1.0); };
  const double contention = oracle.beta_l2 * excess(own.l2, colo_sum.l2) +
                            oracle.beta_dram * excess(own.dram, colo_sum.dram) +
                            oracle.beta_sm * excess(own.sm, colo_sum.sm);
  return (1.0 + contention) * noise_draw;
}

double oracle_noise(const InterferenceOracle& oracle, std::uint64_t batch_id,
                    std::uint64_t segment_index) {
  if (oracle.noise_sigma <= 0.0) return 1.0;
  std::mt19937_64 rng(derive_seed(derive_seed(oracle.seed, batch_id), segment_index));
  std::normal_distribution<double> normal(0.0, oracle.noise_sigma);
  return std::exp(normal(rng));
}

}  // namespace intfsim
