#include "intfsim/batcher.hpp"

#include <algorithm>

namespace intfsim {

namespace {

BatchRequest cut(PendingQueue& q, double now_ms, BatchIdSource& ids) {
  const auto n = std::min<std::size_t>(q.waiting.size(), static_cast<std::size_t>(q.max_batch_size));
  BatchRequest b;
  b.batch_id = ids.take();
  b.model_id = q.model_id;
  b.formed_at_ms = now_ms;
  b.members.assign(std::make_move_iterator(q.waiting.begin()),
                   std::make_move_iterator(q.waiting.begin() + static_cast<std::ptrdiff_t>(n)));
  q.waiting.erase(q.waiting.begin(), q.waiting.begin() + static_cast<std::ptrdiff_t>(n));
  if (q.waiting.empty()) {
    q.window_deadline_ms.reset();
  } else {
    q.window_deadline_ms = now_ms + q.batching_window_ms;
  }
  return b;
}

}  // namespace

std::optional<BatchRequest> enqueue(PendingQueue& queue, RequestEvent req, double now_ms,
                                    BatchIdSource& ids) {
  if (req.model_id != queue.model_id) {
    throw Error("enqueue: request for " + req.model_id + " offered to queue " + queue.model_id);
  }
  if (queue.waiting.empty()) queue.window_deadline_ms = now_ms + queue.batching_window_ms;
  queue.waiting.push_back(std::move(req));
  if (static_cast<int>(queue.waiting.size()) >= queue.max_batch_size) {
    return cut(queue, now_ms, ids);
  }
  return std::nullopt;
}

std::optional<BatchRequest> poll_window(PendingQueue& queue, double now_ms, BatchIdSource& ids) {
  if (queue.waiting.empty() || !queue.window_deadline_ms || now_ms < *queue.window_deadline_ms) {
    return std::nullopt;
  }
  return cut(queue, now_ms, ids);
}

}  // namespace intfsim
