#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "intfsim/workload.hpp"

namespace intfsim {

struct BatchRequest {
  std::uint64_t batch_id = 0;
  std::string model_id;
  std::vector<RequestEvent> members;  // FIFO order
  double formed_at_ms = 0.0;

  int batch_size() const { return static_cast<int>(members.size()); }
};

/// Monotone batch id source shared by all queues of one run.
struct BatchIdSource {
  std::uint64_t next = 0;
  std::uint64_t take() { return next++; }
};

/// Dynamic-batching queue for one model. The first request entering an empty
/// queue arms a window; the batch is cut when the window expires or as soon
/// as max_batch_size requests are waiting.
struct PendingQueue {
  std::string model_id;
  double batching_window_ms = 0.0;
  int max_batch_size = 8;
  std::deque<RequestEvent> waiting;
  std::optional<double> window_deadline_ms;  // present iff waiting non-empty
};

std::optional<BatchRequest> enqueue(PendingQueue& queue, RequestEvent req, double now_ms,
                                    BatchIdSource& ids);

/// Cuts a batch if the window has expired. Leftovers beyond max_batch_size
/// re-arm a fresh window at now_ms.
std::optional<BatchRequest> poll_window(PendingQueue& queue, double now_ms, BatchIdSource& ids);

}  // namespace intfsim
