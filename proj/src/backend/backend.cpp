#include "pilotkit/backend/backend.hpp"

#include <algorithm>
#include <deque>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::backend {

namespace {
const std::string kJobStateNames[] = {"PENDING", "RUNNING", "DONE", "FAILED", "CANCELED"};
}

const std::string& to_string(JobState s) { return kJobStateNames[static_cast<int>(s)]; }

void to_json(Json& j, const AgentBootstrap& b) {
  j = Json{{"session_dir", b.session_dir.string()},
           {"pilot_id", b.pilot_id},
           {"resource", b.resource},
           {"cores", b.cores},
           {"gpus", b.gpus},
           {"walltime_s", b.walltime_s},
           {"executors", b.executors},
           {"poll_ms", b.poll_ms}};
}

void from_json(const Json& j, AgentBootstrap& b) {
  b.session_dir = j.at("session_dir").get<std::string>();
  b.pilot_id = j.at("pilot_id").get<std::string>();
  b.resource = j.at("resource").get<ResourceConfig>();
  b.cores = j.at("cores").get<int>();
  b.gpus = j.value("gpus", 0);
  b.walltime_s = j.value("walltime_s", 60.0);
  b.executors = j.value("executors", 0);
  b.poll_ms = j.value("poll_ms", 5);
}

double SteadyClock::now_s() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

namespace {

struct Job {
  std::string id;
  JobState state = JobState::PENDING;
  AgentBootstrap bootstrap;
  double submit_t = 0.0;
  double wait_s = 0.0;
  std::unique_ptr<AgentHandle> agent;
};

/// Common job-table machinery; subclasses decide when a PENDING job may start.
class BaseBackend : public Backend {
 public:
  BaseBackend(std::string name, ResourceConfig config, AgentLauncher launcher,
              std::shared_ptr<ClockSource> clock)
      : name_(std::move(name)),
        config_(std::move(config)),
        launcher_(std::move(launcher)),
        clock_(clock ? std::move(clock) : std::make_shared<SteadyClock>()) {
    validate_resource_config(config_);
  }

  ~BaseBackend() override {
    stop_pump();
    std::lock_guard lock(mutex_);
    for (auto& [id, job] : jobs_) {
      if (job.state == JobState::RUNNING && job.agent) {
        job.agent->terminate();
        job.state = JobState::CANCELED;
      }
    }
  }

  const std::string& name() const override { return name_; }
  const ResourceConfig& config() const override { return config_; }

  JobHandle submit_pilot_job(const PilotDescription& pdesc,
                             const AgentBootstrap& bootstrap) override {
    validate_pilot_description(pdesc);
    if (pdesc.cores > config_.total_cores() || pdesc.gpus > config_.total_gpus())
      throw Error(ErrorCode::OversubscribedRequest, pdesc.resource,
                  "request of " + std::to_string(pdesc.cores) + " cores / " +
                      std::to_string(pdesc.gpus) + " gpus exceeds " + config_.name);
    std::lock_guard lock(mutex_);
    std::string id = name_ + ".job." + std::to_string(next_job_++);
    Job job;
    job.id = id;
    job.bootstrap = bootstrap;
    job.submit_t = clock_->now_s();
    job.wait_s = sample_wait();
    submit_order_.push_back(id);
    jobs_.emplace(id, std::move(job));
    advance_locked();
    return JobHandle{name_, id, wall_now_s()};
  }

  JobState job_state(const JobHandle& handle) override {
    std::lock_guard lock(mutex_);
    Job& job = find_locked(handle);
    advance_locked();
    return job.state;
  }

  void cancel_job(const JobHandle& handle) override {
    std::lock_guard lock(mutex_);
    Job& job = find_locked(handle);
    if (job.state == JobState::PENDING) {
      job.state = JobState::CANCELED;
    } else if (job.state == JobState::RUNNING) {
      if (job.agent) job.agent->terminate();
      job.state = JobState::CANCELED;
    }
    // terminal: acknowledge without touching the state
    advance_locked();
  }

 protected:
  virtual double sample_wait() = 0;
  virtual int max_concurrent() const = 0;

  // pump start/stop bracket the most-derived lifetime: the pump dispatches
  // through the vtable
  void start_pump() { pump_thread_ = std::thread([this] { pump_loop(); }); }

  void stop_pump() {
    stop_.store(true);
    if (pump_thread_.joinable()) pump_thread_.join();
  }

  Job& find_locked(const JobHandle& handle) {
    if (handle.backend != name_)
      throw Error(ErrorCode::UnknownJob, handle.job_id,
                  "handle from backend " + handle.backend + " is foreign to " + name_);
    auto it = jobs_.find(handle.job_id);
    if (it == jobs_.end())
      throw Error(ErrorCode::UnknownJob, handle.job_id, "unknown job " + handle.job_id);
    return it->second;
  }

  // Moves jobs forward: reap finished agents, then start eligible PENDING
  // jobs in submission order. Caller holds the mutex.
  void advance_locked() {
    int running = 0;
    for (auto& id : submit_order_) {
      Job& job = jobs_.at(id);
      if (job.state != JobState::RUNNING) continue;
      if (auto exit = job.agent ? job.agent->poll_exit() : std::nullopt) {
        job.state = *exit == 0 ? JobState::DONE : JobState::FAILED;
      } else {
        ++running;
      }
    }
    const double now = clock_->now_s();
    for (auto& id : submit_order_) {
      if (running >= max_concurrent()) break;
      Job& job = jobs_.at(id);
      if (job.state != JobState::PENDING) continue;
      if (now - job.submit_t < job.wait_s) continue;
      try {
        job.agent = launcher_(job.bootstrap);
        job.state = JobState::RUNNING;
        ++running;
      } catch (const Error&) {
        job.state = JobState::FAILED;
      }
    }
  }

  void pump_loop() {
    while (!stop_.load()) {
      {
        std::lock_guard lock(mutex_);
        advance_locked();
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  std::string name_;
  ResourceConfig config_;
  AgentLauncher launcher_;
  std::shared_ptr<ClockSource> clock_;
  std::mutex mutex_;
  std::map<std::string, Job> jobs_;
  std::deque<std::string> submit_order_;
  int next_job_ = 1;
  std::atomic<bool> stop_{false};
  std::thread pump_thread_;
};

class LocalBackend final : public BaseBackend {
 public:
  LocalBackend(ResourceConfig config, AgentLauncher launcher)
      : BaseBackend("local." + config.name, std::move(config), std::move(launcher), nullptr) {
    start_pump();
  }

  ~LocalBackend() override { stop_pump(); }

 protected:
  double sample_wait() override { return 0.0; }
  int max_concurrent() const override { return 1 << 30; }
};

class BatchSimBackend final : public BaseBackend {
 public:
  BatchSimBackend(ResourceConfig config, AgentLauncher launcher,
                  std::shared_ptr<ClockSource> clock)
      : BaseBackend("batch." + config.name, std::move(config), std::move(launcher),
                    std::move(clock)),
        sampler_(config_.batch->queue_wait) {
    start_pump();
  }

  ~BatchSimBackend() override { stop_pump(); }

 protected:
  double sample_wait() override { return sampler_.next(); }
  int max_concurrent() const override { return config_.batch->max_concurrent_jobs; }

 private:
  WaitSampler sampler_;
};

}  // namespace

std::unique_ptr<Backend> make_local_backend(ResourceConfig config, AgentLauncher launcher) {
  return std::make_unique<LocalBackend>(std::move(config), std::move(launcher));
}

std::unique_ptr<Backend> make_batch_sim_backend(ResourceConfig config, AgentLauncher launcher,
                                                std::shared_ptr<ClockSource> clock) {
  if (!config.batch)
    throw Error(ErrorCode::ValidationError, "batch",
                "batch simulation requires a batch section in the resource config");
  return std::make_unique<BatchSimBackend>(std::move(config), std::move(launcher),
                                           std::move(clock));
}

std::unique_ptr<Backend> make_backend(ResourceConfig config, AgentLauncher launcher,
                                      std::shared_ptr<ClockSource> clock) {
  if (config.batch)
    return make_batch_sim_backend(std::move(config), std::move(launcher), std::move(clock));
  return make_local_backend(std::move(config), std::move(launcher));
}

}  // namespace pilotkit::backend
