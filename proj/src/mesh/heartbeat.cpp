#include "pilotkit/mesh/heartbeat.hpp"

#include "pilotkit/core/types.hpp"

namespace pilotkit::mesh {

std::uint64_t HeartbeatRegistry::beat(const std::string& component) {
  std::lock_guard lock(mutex_);
  auto& e = entries_[component];
  e.sequence += 1;
  e.last_ns = monotonic_now_ns();
  e.reported_lost = false;
  return e.sequence;
}

void HeartbeatRegistry::deregister(const std::string& component) {
  std::lock_guard lock(mutex_);
  entries_.erase(component);
}

std::vector<ComponentLost> HeartbeatRegistry::sweep(std::int64_t now_ns) {
  std::lock_guard lock(mutex_);
  std::vector<ComponentLost> lost;
  const auto limit =
      static_cast<std::int64_t>(interval_.count()) * 1'000'000 * (loss_threshold_ + 1);
  for (auto& [name, e] : entries_) {
    if (e.reported_lost) continue;
    if (now_ns - e.last_ns > limit) {
      e.reported_lost = true;
      lost.push_back({name, e.sequence});
    }
  }
  return lost;
}

HeartbeatMonitor::HeartbeatMonitor(HeartbeatRegistry& registry,
                                   BulkQueue<ComponentLost>& lost_queue)
    : registry_(registry), lost_queue_(lost_queue), thread_([this] { run(); }) {}

HeartbeatMonitor::~HeartbeatMonitor() { stop(); }

void HeartbeatMonitor::stop() {
  stop_.store(true);
  if (thread_.joinable()) thread_.join();
}

void HeartbeatMonitor::run() {
  const auto tick = std::min<std::chrono::milliseconds>(registry_.interval(),
                                                        std::chrono::milliseconds(50));
  while (!stop_.load()) {
    for (auto& l : registry_.sweep(monotonic_now_ns())) {
      try {
        lost_queue_.put(std::move(l));
      } catch (const Error&) {
        return;  // queue closed: shutting down
      }
    }
    std::this_thread::sleep_for(tick);
  }
}

}  // namespace pilotkit::mesh
