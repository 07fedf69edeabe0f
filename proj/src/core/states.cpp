#include "pilotkit/core/states.hpp"

#include <algorithm>
#include <array>

#include "pilotkit/core/errors.hpp"

namespace pilotkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::OversubscribedRequest: return "OversubscribedRequest";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::UnknownJob: return "UnknownJob";
    case ErrorCode::QueueClosed: return "QueueClosed";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::MissingSource: return "MissingSource";
    case ErrorCode::DuplicateAttachment: return "DuplicateAttachment";
    case ErrorCode::UnschedulableUnit: return "UnschedulableUnit";
    case ErrorCode::ImpossibleRequest: return "ImpossibleRequest";
    case ErrorCode::DoubleRelease: return "DoubleRelease";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::MissingStagedFile: return "MissingStagedFile";
    case ErrorCode::EscapePath: return "EscapePath";
    case ErrorCode::MissingOutput: return "MissingOutput";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::InvalidControl: return "InvalidControl";
    case ErrorCode::ImmutablePast: return "ImmutablePast";
    case ErrorCode::ResourceAcquisitionFailed: return "ResourceAcquisitionFailed";
    case ErrorCode::RecoveryLoop: return "RecoveryLoop";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::IllegalHistory: return "IllegalHistory";
    case ErrorCode::PilotNeverActive: return "PilotNeverActive";
    case ErrorCode::NoSuchSession: return "NoSuchSession";
    case ErrorCode::Timeout: return "Timeout";
  }
  return "UnknownError";
}

StateMachine::StateMachine(std::string name, std::vector<std::string> states, int chain_end,
                           int success_terminal, std::vector<int> failure_terminals)
    : name_(std::move(name)),
      states_(std::move(states)),
      chain_end_(chain_end),
      success_terminal_(success_terminal),
      failure_terminals_(std::move(failure_terminals)) {}

std::optional<int> StateMachine::state_index(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) return std::nullopt;
  return static_cast<int>(it - states_.begin());
}

bool StateMachine::is_terminal(int s) const {
  if (s == success_terminal_) return true;
  return std::find(failure_terminals_.begin(), failure_terminals_.end(), s) !=
         failure_terminals_.end();
}

bool StateMachine::legal(int from, int to) const {
  if (from < 0 || to < 0 || from >= state_count() || to >= state_count()) return false;
  if (is_terminal(from)) return false;
  if (to <= chain_end_) return to == from + 1;
  if (to == success_terminal_) return from == chain_end_;
  // remaining targets are the failure terminals, reachable from any non-terminal
  return std::find(failure_terminals_.begin(), failure_terminals_.end(), to) !=
         failure_terminals_.end();
}

namespace {

const StateMachine& pilot_machine() {
  static const StateMachine m("PilotState",
                              {"NEW", "LAUNCHING", "QUEUED", "ACTIVE", "DONE", "FAILED",
                               "CANCELED"},
                              3, 4, {5, 6});
  return m;
}

const StateMachine& unit_machine() {
  static const StateMachine m(
      "UnitState",
      {"NEW", "UMGR_SCHEDULING", "UMGR_STAGING_INPUT", "AGENT_STAGING_INPUT",
       "AGENT_SCHEDULING", "EXECUTING", "AGENT_STAGING_OUTPUT", "DONE", "FAILED", "CANCELED"},
      6, 7, {8, 9});
  return m;
}

const StateMachine& task_machine() {
  static const StateMachine m("TaskState",
                              {"SPECIFIED", "SCHEDULED", "SUBMITTED", "EXECUTED", "DONE",
                               "FAILED"},
                              3, 4, {5});
  return m;
}

const StateMachine& stage_machine() {
  static const StateMachine m("StageState", {"NEW", "DISPATCHING", "DONE", "FAILED", "CANCELED"},
                              1, 2, {3, 4});
  return m;
}

const StateMachine& pipeline_machine() {
  static const StateMachine m("PipelineState", {"NEW", "RUNNING", "DONE", "FAILED", "STOPPED"},
                              1, 2, {3, 4});
  return m;
}

template <typename E>
E checked_transition(const StateMachine& m, E from, E to) {
  const int f = static_cast<int>(from);
  const int t = static_cast<int>(to);
  if (!m.legal(f, t)) {
    throw Error(ErrorCode::IllegalTransition, m.state_name(f) + "->" + m.state_name(t),
                m.name() + " forbids " + m.state_name(f) + " -> " + m.state_name(t));
  }
  return to;
}

}  // namespace

const StateMachine& machine(StateMachineId id) {
  switch (id) {
    case StateMachineId::Pilot: return pilot_machine();
    case StateMachineId::Unit: return unit_machine();
    case StateMachineId::Task: return task_machine();
    case StateMachineId::Stage: return stage_machine();
    case StateMachineId::Pipeline: return pipeline_machine();
  }
  return pilot_machine();
}

const std::string& to_string(PilotState s) { return pilot_machine().state_name(static_cast<int>(s)); }
const std::string& to_string(UnitState s) { return unit_machine().state_name(static_cast<int>(s)); }
const std::string& to_string(TaskState s) { return task_machine().state_name(static_cast<int>(s)); }
const std::string& to_string(StageState s) { return stage_machine().state_name(static_cast<int>(s)); }
const std::string& to_string(PipelineState s) {
  return pipeline_machine().state_name(static_cast<int>(s));
}

std::optional<PilotState> pilot_state_from_string(std::string_view name) {
  auto i = pilot_machine().state_index(name);
  if (!i) return std::nullopt;
  return static_cast<PilotState>(*i);
}

std::optional<UnitState> unit_state_from_string(std::string_view name) {
  auto i = unit_machine().state_index(name);
  if (!i) return std::nullopt;
  return static_cast<UnitState>(*i);
}

std::optional<TaskState> task_state_from_string(std::string_view name) {
  auto i = task_machine().state_index(name);
  if (!i) return std::nullopt;
  return static_cast<TaskState>(*i);
}

bool is_terminal(PilotState s) { return pilot_machine().is_terminal(static_cast<int>(s)); }
bool is_terminal(UnitState s) { return unit_machine().is_terminal(static_cast<int>(s)); }
bool is_terminal(TaskState s) { return task_machine().is_terminal(static_cast<int>(s)); }
bool is_terminal(StageState s) { return stage_machine().is_terminal(static_cast<int>(s)); }
bool is_terminal(PipelineState s) { return pipeline_machine().is_terminal(static_cast<int>(s)); }

PilotState transition(PilotState from, PilotState to) {
  return checked_transition(pilot_machine(), from, to);
}
UnitState transition(UnitState from, UnitState to) {
  return checked_transition(unit_machine(), from, to);
}
TaskState transition(TaskState from, TaskState to) {
  return checked_transition(task_machine(), from, to);
}
StageState transition(StageState from, StageState to) {
  return checked_transition(stage_machine(), from, to);
}
PipelineState transition(PipelineState from, PipelineState to) {
  return checked_transition(pipeline_machine(), from, to);
}

}  // namespace pilotkit
