#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pilotkit/backend/resource_config.hpp"
#include "pilotkit/core/types.hpp"

namespace pilotkit::backend {

enum class JobState { PENDING, RUNNING, DONE, FAILED, CANCELED };

const std::string& to_string(JobState s);

struct JobHandle {
  std::string backend;
  std::string job_id;
  double submitted_wall_s = 0.0;
};

/// Everything an agent needs to come up, serialized to one JSON file whose
/// path is the agent process's single argument.
struct AgentBootstrap {
  std::filesystem::path session_dir;
  std::string pilot_id;
  ResourceConfig resource;
  int cores = 1;
  int gpus = 0;
  double walltime_s = 60.0;
  int executors = 0;  // 0: hardware default
  int poll_ms = 5;
};

void to_json(Json& j, const AgentBootstrap& b);
void from_json(const Json& j, AgentBootstrap& b);

/// Live handle on a launched agent, process- or thread-backed.
class AgentHandle {
 public:
  virtual ~AgentHandle() = default;
  virtual std::optional<int> poll_exit() = 0;  // exit code once finished
  virtual void terminate() = 0;                // cancel: stop the agent now
};

using AgentLauncher = std::function<std::unique_ptr<AgentHandle>(const AgentBootstrap&)>;

/// Injectable time source so the simulated batch queue can be driven by
/// tests; seconds on an arbitrary monotonic epoch.
class ClockSource {
 public:
  virtual ~ClockSource() = default;
  virtual double now_s() const = 0;
};

class SteadyClock : public ClockSource {
 public:
  double now_s() const override;
};

class ManualClock : public ClockSource {
 public:
  double now_s() const override { return t_.load(); }
  void advance(double dt) { t_.store(t_.load() + dt); }
  void set(double t) { t_.store(t); }

 private:
  std::atomic<double> t_{0.0};
};

/// Uniform job-submission surface over the local and simulated-batch
/// executions of a pilot. One instance owns one job table; operations are
/// serialized on it.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const std::string& name() const = 0;
  virtual const ResourceConfig& config() const = 0;

  /// Starts the pilot's agent once the backend's wait policy allows it.
  /// Throws OversubscribedRequest / BackendUnavailable.
  virtual JobHandle submit_pilot_job(const PilotDescription& pdesc,
                                     const AgentBootstrap& bootstrap) = 0;

  virtual JobState job_state(const JobHandle& handle) = 0;

  /// Idempotent; terminal jobs keep their state.
  virtual void cancel_job(const JobHandle& handle) = 0;
};

/// Local backend: no queue, the agent starts at submission.
std::unique_ptr<Backend> make_local_backend(ResourceConfig config, AgentLauncher launcher);

/// Simulated batch system: per-job queue wait sampled from the configured
/// distribution, bounded concurrency.
std::unique_ptr<Backend> make_batch_sim_backend(ResourceConfig config, AgentLauncher launcher,
                                                std::shared_ptr<ClockSource> clock = nullptr);

/// Picks local or batch-sim from config.batch.
std::unique_ptr<Backend> make_backend(ResourceConfig config, AgentLauncher launcher,
                                      std::shared_ptr<ClockSource> clock = nullptr);

}  // namespace pilotkit::backend
