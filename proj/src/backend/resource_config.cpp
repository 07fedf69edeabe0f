#include "pilotkit/backend/resource_config.hpp"

#include <cstdlib>
#include <fstream>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::backend {

namespace fs = std::filesystem;

void validate_resource_config(const ResourceConfig& cfg) {
  if (cfg.name.empty())
    throw Error(ErrorCode::ValidationError, "name", "resource config needs a name");
  if (cfg.nodes < 1 || cfg.cores_per_node < 1)
    throw Error(ErrorCode::ValidationError, "nodes",
                "resource must have at least one node with one core");
  if (cfg.gpus_per_node < 0)
    throw Error(ErrorCode::ValidationError, "gpus_per_node", "gpus_per_node must be >= 0");
  if (!cfg.launch_templates.count(LaunchMethod::DIRECT))
    throw Error(ErrorCode::ValidationError, "launch_templates",
                "launch_templates must contain DIRECT");
  if (cfg.batch) {
    const auto& b = *cfg.batch;
    if (b.max_concurrent_jobs < 1)
      throw Error(ErrorCode::ValidationError, "max_concurrent_jobs",
                  "max_concurrent_jobs must be >= 1");
    if (b.queue_wait.fixed_s < 0)
      throw Error(ErrorCode::ValidationError, "queue_wait", "wait values must be >= 0");
    if (b.queue_wait.uniform_s &&
        (b.queue_wait.uniform_s->first < 0 ||
         b.queue_wait.uniform_s->second < b.queue_wait.uniform_s->first))
      throw Error(ErrorCode::ValidationError, "queue_wait",
                  "uniform wait needs 0 <= min <= max");
  }
}

void to_json(Json& j, const ResourceConfig& cfg) {
  j = Json{{"name", cfg.name},
           {"nodes", cfg.nodes},
           {"cores_per_node", cfg.cores_per_node},
           {"gpus_per_node", cfg.gpus_per_node},
           {"agent_launch",
            cfg.agent_launch == AgentLaunchMode::SUBPROCESS ? "SUBPROCESS" : "IN_PROCESS"},
           {"environment", cfg.environment}};
  Json templates = Json::object();
  for (const auto& [method, tmpl] : cfg.launch_templates)
    templates[method == LaunchMethod::DIRECT ? "DIRECT" : "PARALLEL"] = tmpl;
  j["launch_templates"] = templates;
  if (cfg.batch) {
    Json wait = Json::object();
    if (cfg.batch->queue_wait.uniform_s) {
      wait["uniform_s"] =
          Json::array({cfg.batch->queue_wait.uniform_s->first,
                       cfg.batch->queue_wait.uniform_s->second});
      wait["seed"] = cfg.batch->queue_wait.seed;
    } else {
      wait["fixed_s"] = cfg.batch->queue_wait.fixed_s;
    }
    j["batch"] = Json{{"queue_wait", wait},
                      {"max_concurrent_jobs", cfg.batch->max_concurrent_jobs}};
  }
}

void from_json(const Json& j, ResourceConfig& cfg) {
  cfg.name = j.at("name").get<std::string>();
  cfg.nodes = j.at("nodes").get<int>();
  cfg.cores_per_node = j.at("cores_per_node").get<int>();
  cfg.gpus_per_node = j.value("gpus_per_node", 0);
  std::string mode = j.value("agent_launch", "IN_PROCESS");
  if (mode != "IN_PROCESS" && mode != "SUBPROCESS")
    throw Error(ErrorCode::ValidationError, "agent_launch", "unknown agent_launch " + mode);
  cfg.agent_launch =
      mode == "SUBPROCESS" ? AgentLaunchMode::SUBPROCESS : AgentLaunchMode::IN_PROCESS;
  cfg.environment = j.value("environment", std::map<std::string, std::string>{});
  cfg.launch_templates.clear();
  for (const auto& [key, tmpl] : j.value("launch_templates", Json::object()).items()) {
    if (key == "DIRECT")
      cfg.launch_templates[LaunchMethod::DIRECT] = tmpl.get<std::string>();
    else if (key == "PARALLEL")
      cfg.launch_templates[LaunchMethod::PARALLEL] = tmpl.get<std::string>();
    else
      throw Error(ErrorCode::ValidationError, "launch_templates",
                  "unknown launch method " + key);
  }
  cfg.batch.reset();
  if (j.contains("batch") && !j.at("batch").is_null()) {
    BatchSimConfig b;
    const Json& bj = j.at("batch");
    const Json& wait = bj.at("queue_wait");
    if (wait.contains("uniform_s")) {
      auto arr = wait.at("uniform_s");
      b.queue_wait.uniform_s = std::make_pair(arr.at(0).get<double>(), arr.at(1).get<double>());
      b.queue_wait.seed = wait.value("seed", 0ULL);
    } else {
      b.queue_wait.fixed_s = wait.value("fixed_s", 0.0);
    }
    b.max_concurrent_jobs = bj.value("max_concurrent_jobs", 1);
    cfg.batch = b;
  }
}

fs::path resource_config_dir(const fs::path& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("PILOTKIT_CONFIG_DIR"); env && *env) return env;
  return "configs";
}

ResourceConfig load_resource_config(const std::string& name, const fs::path& config_dir) {
  fs::path file = resource_config_dir(config_dir) / (name + ".json");
  std::ifstream in(file);
  if (!in)
    throw Error(ErrorCode::ValidationError, "resource",
                "no resource configuration " + name + " (looked in " +
                    file.parent_path().string() + ")");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::ValidationError, "resource", "invalid JSON in " + file.string());
  ResourceConfig cfg = j.get<ResourceConfig>();
  if (cfg.name != name)
    throw Error(ErrorCode::ValidationError, "name",
                "config file " + file.string() + " names resource " + cfg.name);
  validate_resource_config(cfg);
  return cfg;
}

WaitSampler::WaitSampler(const WaitDistribution& dist) : dist_(dist), state_(dist.seed) {}

double WaitSampler::next() {
  if (!dist_.uniform_s) return dist_.fixed_s;
  // splitmix64: portable, bit-for-bit stable across platforms
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  double u = static_cast<double>(z >> 11) * 0x1.0p-53;  // [0,1)
  auto [lo, hi] = *dist_.uniform_s;
  return lo + (hi - lo) * u;
}

}  // namespace pilotkit::backend
