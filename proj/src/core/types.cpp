#include "pilotkit/core/types.hpp"

#include <chrono>
#include <numeric>
#include <set>

#include "pilotkit/core/errors.hpp"

namespace pilotkit {

namespace {
const std::string kStagingModeNames[] = {"COPY", "LINK", "MOVE"};
const std::string kEntityKindNames[] = {"PILOT", "UNIT", "TASK", "STAGE", "PIPELINE",
                                        "COMPONENT"};
}  // namespace

const std::string& to_string(StagingMode m) { return kStagingModeNames[static_cast<int>(m)]; }

std::optional<StagingMode> staging_mode_from_string(std::string_view name) {
  for (int i = 0; i < 3; ++i)
    if (kStagingModeNames[i] == name) return static_cast<StagingMode>(i);
  return std::nullopt;
}

const std::string& to_string(EntityKind k) { return kEntityKindNames[static_cast<int>(k)]; }

std::optional<EntityKind> entity_kind_from_string(std::string_view name) {
  for (int i = 0; i < 6; ++i)
    if (kEntityKindNames[i] == name) return static_cast<EntityKind>(i);
  return std::nullopt;
}

namespace {

bool destination_escapes(const std::string& dest) {
  if (dest.empty() || dest.front() == '/') return true;
  // reject any ".." path component
  size_t pos = 0;
  while (pos <= dest.size()) {
    size_t next = dest.find('/', pos);
    if (next == std::string::npos) next = dest.size();
    if (dest.substr(pos, next - pos) == "..") return true;
    pos = next + 1;
  }
  return false;
}

void validate_staging_list(const std::vector<StagingDirective>& list, const char* field) {
  std::set<std::string> seen;
  for (const auto& d : list) {
    if (d.source.empty())
      throw Error(ErrorCode::ValidationError, field, std::string(field) + ": empty source");
    if (destination_escapes(d.destination))
      throw Error(ErrorCode::ValidationError, field,
                  std::string(field) + ": destination must be relative without '..': " +
                      d.destination);
    if (!seen.insert(d.destination).second)
      throw Error(ErrorCode::ValidationError, field,
                  std::string(field) + ": duplicate destination " + d.destination);
  }
}

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

UnitDescription validate_unit_description(const UnitDescription& cud) {
  UnitDescription out = cud;
  if (out.executable.empty())
    throw Error(ErrorCode::ValidationError, "executable", "executable must not be empty");
  if (out.cores < 1)
    throw Error(ErrorCode::ValidationError, "cores", "cores must be >= 1");
  if (out.gpus < 0)
    throw Error(ErrorCode::ValidationError, "gpus", "gpus must be >= 0");
  for (auto& d : out.input_staging)
    if (d.destination.empty()) d.destination = basename_of(d.source);
  for (auto& d : out.output_staging)
    if (d.destination.empty()) d.destination = basename_of(d.source);
  validate_staging_list(out.input_staging, "input_staging");
  validate_staging_list(out.output_staging, "output_staging");
  return out;
}

void validate_pilot_description(const PilotDescription& pdesc) {
  if (pdesc.resource.empty())
    throw Error(ErrorCode::ValidationError, "resource", "resource must not be empty");
  if (pdesc.cores < 1)
    throw Error(ErrorCode::ValidationError, "cores", "pilot cores must be >= 1");
  if (pdesc.gpus < 0)
    throw Error(ErrorCode::ValidationError, "gpus", "pilot gpus must be >= 0");
  if (pdesc.runtime < 1)
    throw Error(ErrorCode::ValidationError, "runtime", "runtime must be >= 1 minute");
}

int Placement::total_cores() const {
  return std::accumulate(node_assignments.begin(), node_assignments.end(), 0,
                         [](int n, const NodeAssignment& a) {
                           return n + static_cast<int>(a.core_indices.size());
                         });
}

int Placement::total_gpus() const {
  return std::accumulate(node_assignments.begin(), node_assignments.end(), 0,
                         [](int n, const NodeAssignment& a) {
                           return n + static_cast<int>(a.gpu_indices.size());
                         });
}

std::int64_t monotonic_now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double wall_now_s() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Event make_event(EntityKind kind, std::string entity_id, std::string event_name,
                 std::string component, Json payload) {
  Event ev;
  ev.mono_ns = monotonic_now_ns();
  ev.wall_s = wall_now_s();
  ev.kind = kind;
  ev.entity_id = std::move(entity_id);
  ev.event_name = std::move(event_name);
  ev.component = std::move(component);
  ev.payload = std::move(payload);
  return ev;
}

void to_json(Json& j, const StagingDirective& d) {
  j = Json{{"source", d.source}, {"destination", d.destination}, {"mode", to_string(d.mode)}};
}

void from_json(const Json& j, StagingDirective& d) {
  if (j.is_string()) {
    // Listing-2 style bare path: destination defaults to the basename,
    // mode defaults to LINK (shared input data).
    d.source = j.get<std::string>();
    d.destination.clear();
    d.mode = StagingMode::LINK;
    return;
  }
  d.source = j.at("source").get<std::string>();
  d.destination = j.value("destination", "");
  auto mode = staging_mode_from_string(j.value("mode", "COPY"));
  if (!mode)
    throw Error(ErrorCode::ValidationError, "mode",
                "unknown staging mode " + j.value("mode", ""));
  d.mode = *mode;
}

void to_json(Json& j, const PilotDescription& d) {
  j = Json{{"resource", d.resource}, {"cores", d.cores},   {"gpus", d.gpus},
           {"runtime", d.runtime},   {"project", d.project}, {"queue", d.queue},
           {"access_schema", d.access_schema}};
}

void from_json(const Json& j, PilotDescription& d) {
  d.resource = j.at("resource").get<std::string>();
  d.cores = j.at("cores").get<int>();
  d.gpus = j.value("gpus", 0);
  d.runtime = j.at("runtime").get<int>();
  d.project = j.value("project", "");
  d.queue = j.value("queue", "");
  d.access_schema = j.value("access_schema", "");
}

void to_json(Json& j, const UnitDescription& d) {
  j = Json{{"executable", d.executable},
           {"arguments", d.arguments},
           {"pre_exec", d.pre_exec},
           {"input_staging", d.input_staging},
           {"output_staging", d.output_staging},
           {"cores", d.cores},
           {"gpus", d.gpus},
           {"mpi", d.mpi},
           {"environment", d.environment}};
  if (!d.tag.empty()) j["tag"] = d.tag;
}

void from_json(const Json& j, UnitDescription& d) {
  d.executable = j.at("executable").get<std::string>();
  d.arguments = j.value("arguments", std::vector<std::string>{});
  d.pre_exec = j.value("pre_exec", std::vector<std::string>{});
  d.input_staging = j.value("input_staging", std::vector<StagingDirective>{});
  d.output_staging = j.value("output_staging", std::vector<StagingDirective>{});
  d.cores = j.value("cores", 1);
  d.gpus = j.value("gpus", 0);
  d.mpi = j.value("mpi", false);
  d.environment = j.value("environment", std::map<std::string, std::string>{});
  d.tag = j.value("tag", "");
}

void to_json(Json& j, const NodeAssignment& a) {
  j = Json{{"node", a.node}, {"cores", a.core_indices}, {"gpus", a.gpu_indices}};
}

void from_json(const Json& j, NodeAssignment& a) {
  a.node = j.at("node").get<std::string>();
  a.core_indices = j.at("cores").get<std::vector<int>>();
  a.gpu_indices = j.at("gpus").get<std::vector<int>>();
}

void to_json(Json& j, const Placement& p) {
  j = Json{{"unit_id", p.unit_id}, {"nodes", p.node_assignments}};
}

void from_json(const Json& j, Placement& p) {
  p.unit_id = j.at("unit_id").get<std::string>();
  p.node_assignments = j.at("nodes").get<std::vector<NodeAssignment>>();
}

void to_json(Json& j, const Unit& u) {
  j = Json{{"id", u.id},
           {"description", u.description},
           {"state", to_string(u.state)},
           {"pilot", u.pilot_id},
           {"sandbox", u.sandbox}};
  if (u.placement) j["placement"] = *u.placement;
  if (u.exit_code) j["exit_code"] = *u.exit_code;
}

void from_json(const Json& j, Unit& u) {
  u.id = j.at("id").get<std::string>();
  u.description = j.at("description").get<UnitDescription>();
  auto st = unit_state_from_string(j.at("state").get<std::string>());
  if (!st) throw Error(ErrorCode::ValidationError, "state", "unknown unit state");
  u.state = *st;
  u.pilot_id = j.value("pilot", "");
  u.sandbox = j.value("sandbox", "");
  if (j.contains("placement")) u.placement = j.at("placement").get<Placement>();
  if (j.contains("exit_code")) u.exit_code = j.at("exit_code").get<int>();
}

void to_json(Json& j, const Event& e) {
  j = Json{{"mono_ns", e.mono_ns},      {"wall_s", e.wall_s},
           {"kind", to_string(e.kind)}, {"entity", e.entity_id},
           {"event", e.event_name},     {"component", e.component}};
  if (!e.payload.is_null()) j["payload"] = e.payload;
}

void from_json(const Json& j, Event& e) {
  e.mono_ns = j.at("mono_ns").get<std::int64_t>();
  e.wall_s = j.at("wall_s").get<double>();
  auto kind = entity_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::ValidationError, "kind", "unknown entity kind");
  e.kind = *kind;
  e.entity_id = j.at("entity").get<std::string>();
  e.event_name = j.at("event").get<std::string>();
  e.component = j.at("component").get<std::string>();
  e.payload = j.value("payload", Json());
}

}  // namespace pilotkit
