#include "intfsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>

#include "intfsim/csv.hpp"

namespace intfsim {

std::vector<Resources> BatchOutcome::colo_history() const {
  std::vector<Resources> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.colo);
  return out;
}

GpuState::GpuState(int concurrency_cap, InterferenceOracle oracle)
    : cap_(concurrency_cap), oracle_(oracle) {
  if (cap_ < 1) throw Error("concurrency cap must be positive");
}

void GpuState::dispatch(BatchRequest batch, const ModelProfile& profile) {
  if (!can_admit()) {
    throw Error("dispatch of batch " + std::to_string(batch.batch_id) + " at concurrency cap " +
                std::to_string(cap_));
  }
  Running r;
  r.batch = std::move(batch);
  r.profile = profile;
  r.start_ms = now_ms_;
  r.open.t_begin_ms = now_ms_;
  r.open.t_end_ms = now_ms_;
  running_.push_back(std::move(r));
  peak_running_ = std::max(peak_running_, static_cast<int>(running_.size()));
  recolocate();
}

void GpuState::recolocate() {
  for (auto& r : running_) {
    std::vector<std::uint64_t> peers;
    Resources colo;
    for (const auto& other : running_) {
      if (&other == &r) continue;
      peers.push_back(other.batch.batch_id);
      colo += other.profile.throughput;
    }
    std::sort(peers.begin(), peers.end());
    if (peers == r.peers) continue;

    if (r.open.t_begin_ms < now_ms_) {
      Segment done = r.open;
      done.t_end_ms = now_ms_;
      done.work_ms = (now_ms_ - done.t_begin_ms) / done.slowdown;
      r.progress_ms += done.work_ms;
      r.closed.push_back(done);
    }
    // A zero-length open segment is replaced, so simultaneous changes at one
    // instant collapse into a single co-location change.
    Segment next;
    next.t_begin_ms = now_ms_;
    next.t_end_ms = now_ms_;
    next.colo = colo;
    next.n_peers = static_cast<int>(peers.size());
    const double noise =
        peers.empty() ? 1.0 : oracle_noise(oracle_, r.batch.batch_id, r.closed.size());
    next.slowdown = oracle_slowdown(r.profile.throughput, colo, oracle_, noise);
    r.open = next;
    r.peers = std::move(peers);
  }
}

std::optional<double> GpuState::next_completion_ms() const {
  std::optional<double> best;
  for (const auto& r : running_) {
    const double t = r.projected_completion_ms();
    if (!best || t < *best) best = t;
  }
  return best;
}

BatchOutcome GpuState::finish(Running& r) {
  Segment last = r.open;
  last.t_end_ms = now_ms_;
  last.work_ms = r.profile.solo_duration_ms - r.progress_ms;
  r.closed.push_back(last);

  BatchOutcome o;
  o.batch_id = r.batch.batch_id;
  o.model_id = r.batch.model_id;
  o.batch_size = r.batch.batch_size();
  o.own = r.profile.throughput;
  o.start_ms = r.start_ms;
  o.completion_time_ms = now_ms_;
  o.profiled_ms = r.profile.solo_duration_ms;
  double measured = 0.0;
  for (const auto& s : r.closed) measured += s.work_ms * s.slowdown;
  o.measured_duration_ms = measured;
  o.interference_ratio = measured / o.profiled_ms;
  o.segments = std::move(r.closed);
  o.members = std::move(r.batch.members);
  return o;
}

std::vector<BatchOutcome> GpuState::advance_to(double t_ms) {
  if (!std::isfinite(t_ms)) throw Error("simulation time is not finite");
  if (t_ms < now_ms_) {
    throw Error("event at " + csv::fmt(t_ms) + " ms lies before the current time " +
                csv::fmt(now_ms_) + " ms");
  }
  now_ms_ = t_ms;
  std::vector<BatchOutcome> done;
  for (auto it = running_.begin(); it != running_.end();) {
    if (it->projected_completion_ms() <= now_ms_) {
      done.push_back(finish(*it));
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
  if (!done.empty()) {
    std::sort(done.begin(), done.end(),
              [](const BatchOutcome& a, const BatchOutcome& b) { return a.batch_id < b.batch_id; });
    recolocate();
  }
  return done;
}

std::vector<BatchOutcome> GpuState::drain() {
  std::vector<BatchOutcome> all;
  while (auto t = next_completion_ms()) {
    for (auto& o : advance_to(*t)) all.push_back(std::move(o));
  }
  return all;
}

std::optional<double> GpuState::slowdown_of(std::uint64_t batch_id) const {
  for (const auto& r : running_) {
    if (r.batch.batch_id == batch_id) return r.open.slowdown;
  }
  return std::nullopt;
}

RunResult run_scenario(const ScenarioSpec& spec_in, const ProfileTable& table) {
  const ScenarioSpec spec = resolve_defaults(spec_in, table);
  const auto arrivals = generate_arrivals(spec);

  std::vector<PendingQueue> queues;
  std::map<std::string, std::size_t> index;
  for (const auto& m : spec.deployed) {
    index[m.model_id] = queues.size();
    queues.push_back({m.model_id, *m.batching_window_ms, spec.max_batch_size, {}, {}});
  }
  auto profile_for = [&](const BatchRequest& b) {
    const auto& m = spec.deployed[index.at(b.model_id)];
    ModelProfile p = table.at(m.profile_id(), b.batch_size());
    p.model_id = m.model_id;
    return p;
  };

  RunResult result;
  result.n_arrivals = arrivals.size();
  GpuState gpu(spec.concurrency_cap, spec.oracle);
  BatchIdSource ids;
  std::deque<BatchRequest> fifo;
  std::size_t next = 0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto poll_all = [&](double t) {
    for (auto& q : queues) {
      if (auto b = poll_window(q, t, ids)) fifo.push_back(std::move(*b));
    }
  };

  while (true) {
    double t = kInf;
    if (next < arrivals.size()) t = arrivals[next].arrival_time_ms;
    for (const auto& q : queues) {
      if (q.window_deadline_ms) t = std::min(t, *q.window_deadline_ms);
    }
    if (auto c = gpu.next_completion_ms()) t = std::min(t, *c);
    if (t == kInf) break;
    if (!std::isfinite(t)) throw Error("non-finite event time in scenario " + spec.name);

    for (auto& o : gpu.advance_to(t)) {
      const double slo = *spec.deployed[index.at(o.model_id)].slo_ms;
      for (const auto& req : o.members) {
        RequestRecord rec;
        rec.request_id = req.request_id;
        rec.model_id = req.model_id;
        rec.arrival_ms = req.arrival_time_ms;
        rec.batch_id = o.batch_id;
        rec.dispatch_ms = o.start_ms;
        rec.completion_ms = o.completion_time_ms;
        rec.latency_ms = rec.completion_ms - rec.arrival_ms;
        rec.queueing_ms = rec.dispatch_ms - rec.arrival_ms;
        rec.slo_ms = slo;
        rec.slo_met = rec.latency_ms <= slo;
        result.requests.push_back(std::move(rec));
      }
      result.outcomes.push_back(std::move(o));
    }

    poll_all(t);
    while (next < arrivals.size() && arrivals[next].arrival_time_ms == t) {
      const auto& req = arrivals[next++];
      auto& q = queues[index.at(req.model_id)];
      if (auto b = enqueue(q, req, t, ids)) fifo.push_back(std::move(*b));
    }
    poll_all(t);

    while (gpu.can_admit() && !fifo.empty()) {
      auto profile = profile_for(fifo.front());
      gpu.dispatch(std::move(fifo.front()), profile);
      fifo.pop_front();
    }
  }

  result.peak_running = gpu.peak_running();
  result.end_ms = gpu.now_ms();
  result.samples = samples_for_mode(result.outcomes, spec.colocation_mode, spec.name);
  return result;
}

std::vector<Sample> samples_for_mode(std::span<const BatchOutcome> outcomes, ColocationMode mode,
                                     const std::string& scenario) {
  std::vector<Sample> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    const auto history = o.colo_history();
    const auto est = replay_history(o.batch_id, mode, history);
    if (!(o.interference_ratio > 0.0) || !std::isfinite(o.interference_ratio)) {
      throw Error("batch " + std::to_string(o.batch_id) + " has a non-positive interference ratio");
    }
    out.push_back({finalize_features(o.own, est), o.interference_ratio, o.batch_id, scenario});
  }
  return out;
}

void write_outcomes_csv(std::span<const BatchOutcome> outcomes, std::ostream& out) {
  out << "batch_id,model_id,batch_size,start_ms,measured_ms,profiled_ms,interference_ratio,n_segments\n";
  for (const auto& o : outcomes) {
    out << o.batch_id << ',' << o.model_id << ',' << o.batch_size << ',' << csv::fmt(o.start_ms)
        << ',' << csv::fmt(o.measured_duration_ms) << ',' << csv::fmt(o.profiled_ms) << ','
        << csv::fmt(o.interference_ratio) << ',' << o.segments.size() << '\n';
  }
}

void write_segments_csv(std::span<const BatchOutcome> outcomes, std::ostream& out) {
  out << "batch_id,segment,t_begin_ms,t_end_ms,slowdown,n_peers,colo_l2,colo_dram,colo_sm\n";
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < o.segments.size(); ++i) {
      const auto& s = o.segments[i];
      out << o.batch_id << ',' << i << ',' << csv::fmt(s.t_begin_ms) << ','
          << csv::fmt(s.t_end_ms) << ',' << csv::fmt(s.slowdown) << ',' << s.n_peers << ','
          << csv::fmt(s.colo.l2) << ',' << csv::fmt(s.colo.dram) << ',' << csv::fmt(s.colo.sm)
          << '\n';
    }
  }
}

}  // namespace intfsim
