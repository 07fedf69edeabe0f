#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pilotkit/mesh/bulk_queue.hpp"

namespace pilotkit::mesh {

struct Heartbeat {
  std::string component;
  std::uint64_t sequence = 0;
  std::int64_t mono_ns = 0;
};

struct ComponentLost {
  std::string component;
  std::uint64_t last_sequence = 0;
};

/// Tracks the latest heartbeat per registered component. A component that
/// misses more than `loss_threshold` intervals is reported lost exactly once
/// per episode; a later beat (restart) rearms detection.
class HeartbeatRegistry {
 public:
  explicit HeartbeatRegistry(std::chrono::milliseconds interval = std::chrono::seconds(1),
                             int loss_threshold = 3)
      : interval_(interval), loss_threshold_(loss_threshold) {}

  std::chrono::milliseconds interval() const { return interval_; }

  /// Sequence is strictly increasing per component.
  std::uint64_t beat(const std::string& component);

  void deregister(const std::string& component);

  /// Components newly considered lost as of now.
  std::vector<ComponentLost> sweep(std::int64_t now_ns);

 private:
  struct Entry {
    std::uint64_t sequence = 0;
    std::int64_t last_ns = 0;
    bool reported_lost = false;
  };

  std::chrono::milliseconds interval_;
  int loss_threshold_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

/// Background sweeper pushing ComponentLost control messages onto a queue.
class HeartbeatMonitor {
 public:
  HeartbeatMonitor(HeartbeatRegistry& registry, BulkQueue<ComponentLost>& lost_queue);
  ~HeartbeatMonitor();

  void stop();

 private:
  void run();

  HeartbeatRegistry& registry_;
  BulkQueue<ComponentLost>& lost_queue_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace pilotkit::mesh
