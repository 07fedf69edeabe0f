#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pilotkit/core/states.hpp"

namespace pilotkit {

using Json = nlohmann::json;

/// Resource placeholder request (Listing-1 shape).
struct PilotDescription {
  std::string resource;  // name of a resource configuration
  int cores = 1;
  int gpus = 0;
  int runtime = 1;  // walltime, minutes
  std::string project;
  std::string queue;
  std::string access_schema;
};

enum class StagingMode { COPY, LINK, MOVE };

const std::string& to_string(StagingMode m);
std::optional<StagingMode> staging_mode_from_string(std::string_view name);

struct StagingDirective {
  std::string source;       // input: user path; output: sandbox-relative path
  std::string destination;  // relative, no parent-directory escapes
  StagingMode mode = StagingMode::COPY;
};

/// Self-contained executable task (Listing-2 shape).
struct UnitDescription {
  std::string executable;
  std::vector<std::string> arguments;
  std::vector<std::string> pre_exec;
  std::vector<StagingDirective> input_staging;
  std::vector<StagingDirective> output_staging;
  int cores = 1;
  int gpus = 0;
  bool mpi = false;
  std::map<std::string, std::string> environment;
  std::string tag;  // opaque caller label, round-tripped into reports (ensemble task uid)
};

/// Validates and normalizes a description (defaults filled). Idempotent.
/// Throws Error(ValidationError) with the offending field in detail().
UnitDescription validate_unit_description(const UnitDescription& cud);

void validate_pilot_description(const PilotDescription& pdesc);

struct NodeAssignment {
  std::string node;
  std::vector<int> core_indices;
  std::vector<int> gpu_indices;
};

struct Placement {
  std::string unit_id;
  std::vector<NodeAssignment> node_assignments;

  int total_cores() const;
  int total_gpus() const;
};

struct Pilot {
  std::string id;
  PilotDescription description;
  PilotState state = PilotState::NEW;
  std::string job_id;  // backend job reference, set once QUEUED
};

struct Unit {
  std::string id;
  UnitDescription description;
  UnitState state = UnitState::NEW;
  std::string pilot_id;  // set when the unit is bound to a pilot
  std::optional<Placement> placement;
  std::optional<int> exit_code;
  std::string sandbox;
};

enum class EntityKind { PILOT, UNIT, TASK, STAGE, PIPELINE, COMPONENT };

const std::string& to_string(EntityKind k);
std::optional<EntityKind> entity_kind_from_string(std::string_view name);

/// Timestamped record of something happening to an entity; the unit of
/// persistence and profiling. State entries use the state name as event name;
/// everything else uses lowercase names.
struct Event {
  std::int64_t mono_ns = 0;  // CLOCK_MONOTONIC, comparable across local processes
  double wall_s = 0.0;       // wall clock, for human display only
  EntityKind kind = EntityKind::COMPONENT;
  std::string entity_id;
  std::string event_name;
  std::string component;
  Json payload;  // optional, null when absent
};

/// Builds a timestamped event. `payload` may be null.
Event make_event(EntityKind kind, std::string entity_id, std::string event_name,
                 std::string component, Json payload = nullptr);

std::int64_t monotonic_now_ns();
double wall_now_s();

void to_json(Json& j, const StagingDirective& d);
void from_json(const Json& j, StagingDirective& d);
void to_json(Json& j, const PilotDescription& d);
void from_json(const Json& j, PilotDescription& d);
void to_json(Json& j, const UnitDescription& d);
void from_json(const Json& j, UnitDescription& d);
void to_json(Json& j, const NodeAssignment& a);
void from_json(const Json& j, NodeAssignment& a);
void to_json(Json& j, const Placement& p);
void from_json(const Json& j, Placement& p);
void to_json(Json& j, const Unit& u);
void from_json(const Json& j, Unit& u);
void to_json(Json& j, const Event& e);
void from_json(const Json& j, Event& e);

}  // namespace pilotkit
