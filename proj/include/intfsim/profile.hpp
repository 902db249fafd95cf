#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "intfsim/common.hpp"

namespace intfsim {

/// Offline solo profile of one (model, batch size) pair. The duration is the
/// profiled 95th-percentile solo execution time; the throughputs are average
/// utilization fractions of L2, DRAM and SM over that execution.
struct ModelProfile {
  std::string model_id;
  int batch_size = 1;
  double solo_duration_ms = 0.0;
  Resources throughput;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

/// Immutable after construction; lookups by (model, batch size).
class ProfileTable {
 public:
  explicit ProfileTable(int max_batch_size = 8);

  /// Inserts an entry; throws on duplicates or out-of-range fields.
  void add(ModelProfile p);

  /// Checks batch-size coverage and duration monotonicity for every model.
  void validate() const;

  const ModelProfile& at(const std::string& model_id, int batch_size) const;
  bool has_model(const std::string& model_id) const;
  std::vector<std::string> models() const;
  std::size_t size() const { return entries_.size(); }
  int max_batch_size() const { return max_batch_size_; }

  /// Entries ordered by (model_id, batch_size).
  std::vector<ModelProfile> entries() const;

  /// Copies every entry of `source` under a new model id. Used to deploy
  /// several independent tasks that share one profiled model.
  void add_alias(const std::string& alias, const std::string& source);

  friend bool operator==(const ProfileTable&, const ProfileTable&) = default;

 private:
  int max_batch_size_;
  std::map<std::pair<std::string, int>, ModelProfile> entries_;
};

inline constexpr const char* kProfileCsvHeader =
    "model_id,batch_size,solo_duration_ms,l2_throughput,dram_throughput,sm_throughput";

ProfileTable parse_profiles(std::istream& in, int max_batch_size = 8);
ProfileTable load_profiles(const std::filesystem::path& path, int max_batch_size = 8);
void write_profiles(const ProfileTable& table, std::ostream& out);
void save_profiles(const ProfileTable& table, const std::filesystem::path& path);

/// A model family for the synthetic generator.
struct Archetype {
  std::string model_id;
  double base_duration_ms = 1.0;   // solo duration at batch size 1
  double batching_efficiency = 0;  // 0: no batching benefit, 1: free batching
  Resources peak;                  // utilization once throughput saturates
};

struct SynthesisSpec {
  std::vector<Archetype> archetypes;
  int max_batch_size = 8;
  double jitter = 0.02;  // relative, applied to throughput fractions only
};

/// Six archetypes modelled on the evaluated CNN and Transformer models.
SynthesisSpec default_synthesis_spec();

/// solo(bs) = base * (1 + (1 - efficiency) * (bs - 1)); utilization follows
/// the normalized throughput curve, jittered per (model, batch size).
ProfileTable gen_synthetic_profiles(const SynthesisSpec& spec, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultProfileSeed = 2025;

/// (batch_size, requests per second) ascending by batch size.
std::vector<std::pair<int, double>> throughput_curve(const ProfileTable& table,
                                                     const std::string& model_id);

}  // namespace intfsim
