#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intfsim/batcher.hpp"
#include "intfsim/colocation.hpp"
#include "intfsim/metrics.hpp"
#include "intfsim/oracle.hpp"
#include "intfsim/profile.hpp"
#include "intfsim/workload.hpp"

namespace intfsim {

/// Interval of a batch's execution with a constant co-located set.
struct Segment {
  double t_begin_ms = 0.0;
  double t_end_ms = 0.0;
  double slowdown = 1.0;
  double work_ms = 0.0;  // solo-equivalent progress made in this segment
  Resources colo;        // summed throughput of the co-located peers
  int n_peers = 0;
};

struct BatchOutcome {
  std::uint64_t batch_id = 0;
  std::string model_id;
  int batch_size = 0;
  Resources own;
  double start_ms = 0.0;
  double completion_time_ms = 0.0;
  double profiled_ms = 0.0;          // total work = solo duration
  double measured_duration_ms = 0.0; // sum of work * slowdown over segments
  double interference_ratio = 1.0;
  std::vector<Segment> segments;
  std::vector<RequestEvent> members;

  /// Co-located sums seen by the batch, one per segment in order.
  std::vector<Resources> colo_history() const;
};

/// The simulated accelerator: at most `concurrency_cap` batches progress
/// concurrently, each at rate 1/slowdown, where the slowdown is piecewise
/// constant between co-location changes.
class GpuState {
 public:
  GpuState(int concurrency_cap, InterferenceOracle oracle);

  double now_ms() const { return now_ms_; }
  std::size_t running() const { return running_.size(); }
  bool can_admit() const { return static_cast<int>(running_.size()) < cap_; }
  int peak_running() const { return peak_running_; }

  /// Starts `batch` at now_ms. Throws when the GPU is at its cap.
  void dispatch(BatchRequest batch, const ModelProfile& profile);

  /// Earliest projected completion among running batches.
  std::optional<double> next_completion_ms() const;

  /// Moves time forward to t_ms and returns batches completed by then.
  std::vector<BatchOutcome> advance_to(double t_ms);

  /// Runs until idle (no further dispatches) and returns all completions.
  std::vector<BatchOutcome> drain();

  /// Current slowdown of a running batch, for inspection.
  std::optional<double> slowdown_of(std::uint64_t batch_id) const;

 private:
  struct Running {
    BatchRequest batch;
    ModelProfile profile;
    double start_ms = 0.0;
    double progress_ms = 0.0;  // at the start of the open segment
    std::vector<Segment> closed;
    Segment open;
    std::vector<std::uint64_t> peers;  // sorted ids of the open segment's peers

    double projected_completion_ms() const {
      return open.t_begin_ms + (profile.solo_duration_ms - progress_ms) * open.slowdown;
    }
  };

  void recolocate();
  BatchOutcome finish(Running& r);

  int cap_;
  InterferenceOracle oracle_;
  double now_ms_ = 0.0;
  int peak_running_ = 0;
  std::vector<Running> running_;  // dispatch order
};

struct RunResult {
  std::vector<BatchOutcome> outcomes;  // completion order
  std::vector<RequestRecord> requests; // completion order
  std::vector<Sample> samples;         // one per batch, for the scenario's mode
  std::size_t n_arrivals = 0;
  int peak_running = 0;
  double end_ms = 0.0;
};

/// Arrivals -> per-model batcher -> FIFO dispatch queue -> GPU, run until
/// every request has completed. Deterministic in (spec, table).
RunResult run_scenario(const ScenarioSpec& spec, const ProfileTable& table);

/// Features for every batch of a run under the given co-location mode,
/// ordered by completion.
std::vector<Sample> samples_for_mode(std::span<const BatchOutcome> outcomes, ColocationMode mode,
                                     const std::string& scenario);

void write_outcomes_csv(std::span<const BatchOutcome> outcomes, std::ostream& out);
void write_segments_csv(std::span<const BatchOutcome> outcomes, std::ostream& out);

}  // namespace intfsim
