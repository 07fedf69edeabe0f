#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "pilotkit/core/types.hpp"

namespace pilotkit::backend {

enum class AgentLaunchMode { IN_PROCESS, SUBPROCESS };
enum class LaunchMethod { DIRECT, PARALLEL };

/// Queue-wait sampling for the simulated batch system: a fixed delay or a
/// seeded uniform[min,max]. Sampling is bit-for-bit reproducible per seed.
struct WaitDistribution {
  double fixed_s = 0.0;
  std::optional<std::pair<double, double>> uniform_s;
  std::uint64_t seed = 0;
};

struct BatchSimConfig {
  WaitDistribution queue_wait;
  int max_concurrent_jobs = 1;
};

struct ResourceConfig {
  std::string name;
  int nodes = 1;
  int cores_per_node = 1;
  int gpus_per_node = 0;
  AgentLaunchMode agent_launch = AgentLaunchMode::IN_PROCESS;
  std::optional<BatchSimConfig> batch;  // absent: local backend
  std::map<LaunchMethod, std::string> launch_templates;
  std::map<std::string, std::string> environment;

  long total_cores() const { return static_cast<long>(nodes) * cores_per_node; }
  long total_gpus() const { return static_cast<long>(nodes) * gpus_per_node; }
};

void validate_resource_config(const ResourceConfig& cfg);

void to_json(Json& j, const ResourceConfig& cfg);
void from_json(const Json& j, ResourceConfig& cfg);

/// Loads <dir>/<name>.json. Directory resolution: explicit argument, else
/// $PILOTKIT_CONFIG_DIR, else ./configs.
ResourceConfig load_resource_config(const std::string& name,
                                    const std::filesystem::path& config_dir = {});

std::filesystem::path resource_config_dir(const std::filesystem::path& explicit_dir = {});

/// Deterministic wait sampler: the n-th submission gets the n-th sample.
class WaitSampler {
 public:
  explicit WaitSampler(const WaitDistribution& dist);
  double next();

 private:
  WaitDistribution dist_;
  std::uint64_t state_;
};

}  // namespace pilotkit::backend
