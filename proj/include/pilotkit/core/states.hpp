#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pilotkit {

enum class PilotState { NEW, LAUNCHING, QUEUED, ACTIVE, DONE, FAILED, CANCELED };

enum class UnitState {
  NEW,
  UMGR_SCHEDULING,
  UMGR_STAGING_INPUT,
  AGENT_STAGING_INPUT,
  AGENT_SCHEDULING,
  EXECUTING,
  AGENT_STAGING_OUTPUT,
  DONE,
  FAILED,
  CANCELED,
};

enum class TaskState { SPECIFIED, SCHEDULED, SUBMITTED, EXECUTED, DONE, FAILED };

enum class StageState { NEW, DISPATCHING, DONE, FAILED, CANCELED };

enum class PipelineState { NEW, RUNNING, DONE, FAILED, STOPPED };

/// Pause/stop control of a pipeline. Orthogonal to the lifecycle machine:
/// a SUSPENDED pipeline stays in lifecycle state RUNNING, it just stops
/// dispatching new work.
enum class PipelineControl { RUNNING, SUSPENDED, STOPPED };

enum class StateMachineId { Pilot, Unit, Task, Stage, Pipeline };

/// One lifecycle machine. All five machines share the same shape: a forward
/// chain of working states, one success terminal reachable only from the end
/// of the chain, and failure terminals reachable from every non-terminal.
class StateMachine {
 public:
  StateMachine(std::string name, std::vector<std::string> states, int chain_end,
               int success_terminal, std::vector<int> failure_terminals);

  const std::string& name() const { return name_; }
  int state_count() const { return static_cast<int>(states_.size()); }
  const std::string& state_name(int s) const { return states_.at(s); }
  std::optional<int> state_index(std::string_view name) const;

  bool is_terminal(int s) const;
  bool legal(int from, int to) const;

  /// Lowest-index failure terminal (FAILED for every machine).
  int failed_state() const { return failure_terminals_.front(); }

 private:
  std::string name_;
  std::vector<std::string> states_;
  int chain_end_;
  int success_terminal_;
  std::vector<int> failure_terminals_;
};

const StateMachine& machine(StateMachineId id);

const std::string& to_string(PilotState s);
const std::string& to_string(UnitState s);
const std::string& to_string(TaskState s);
const std::string& to_string(StageState s);
const std::string& to_string(PipelineState s);

std::optional<PilotState> pilot_state_from_string(std::string_view name);
std::optional<UnitState> unit_state_from_string(std::string_view name);
std::optional<TaskState> task_state_from_string(std::string_view name);

bool is_terminal(PilotState s);
bool is_terminal(UnitState s);
bool is_terminal(TaskState s);
bool is_terminal(StageState s);
bool is_terminal(PipelineState s);

/// Checked transition. Returns `to` when the edge is legal for the machine,
/// throws Error(IllegalTransition) otherwise. The caller owns the entity and
/// must emit exactly one Event per accepted transition.
PilotState transition(PilotState from, PilotState to);
UnitState transition(UnitState from, UnitState to);
TaskState transition(TaskState from, TaskState to);
StageState transition(StageState from, StageState to);
PipelineState transition(PipelineState from, PipelineState to);

}  // namespace pilotkit
