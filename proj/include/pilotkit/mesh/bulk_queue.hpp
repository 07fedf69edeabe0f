#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::mesh {

/// Many-producer many-consumer FIFO with bulk operations. Queues are the only
/// channel between components: a message belongs to exactly one consumer once
/// taken. close() stops producers immediately; consumers drain the remainder
/// and then see QueueClosed.
template <typename T>
class BulkQueue {
 public:
  explicit BulkQueue(std::optional<size_t> capacity = std::nullopt) : capacity_(capacity) {}

  BulkQueue(const BulkQueue&) = delete;
  BulkQueue& operator=(const BulkQueue&) = delete;

  size_t put(T message) {
    std::vector<T> one;
    one.push_back(std::move(message));
    return put_bulk(std::move(one));
  }

  /// All-or-nothing enqueue preserving order. Returns the bulk size.
  size_t put_bulk(std::vector<T> messages) {
    if (messages.empty())
      throw Error(ErrorCode::PreconditionViolated, "put_bulk requires a non-empty bulk");
    std::unique_lock lock(mutex_);
    if (capacity_ && messages.size() > *capacity_)
      throw Error(ErrorCode::PreconditionViolated, "bulk exceeds queue capacity");
    not_full_.wait(lock, [&] {
      return closed_ || !capacity_ || items_.size() + messages.size() <= *capacity_;
    });
    if (closed_) throw Error(ErrorCode::QueueClosed, "put on closed queue");
    for (auto& m : messages) items_.push_back(std::move(m));
    lock.unlock();
    not_empty_.notify_all();
    return messages.size();
  }

  /// Between 0 (timeout) and max_n messages, in queue order. Throws
  /// QueueClosed once the queue is closed and fully drained.
  std::vector<T> get_bulk(size_t max_n, std::chrono::milliseconds timeout) {
    if (max_n < 1) throw Error(ErrorCode::PreconditionViolated, "get_bulk requires max_n >= 1");
    std::unique_lock lock(mutex_);
    not_empty_.wait_for(lock, timeout, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) {
      if (closed_) throw Error(ErrorCode::QueueClosed, "queue closed and drained");
      return {};
    }
    std::vector<T> out;
    size_t n = std::min(max_n, items_.size());
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      out.push_back(std::move(items_.front()));
      items_.pop_front();
    }
    lock.unlock();
    not_full_.notify_all();
    return out;
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

  size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  std::optional<size_t> capacity_;
  bool closed_ = false;
};

}  // namespace pilotkit::mesh
