#pragma once

#include <stdexcept>
#include <string>

namespace pilotkit {

enum class ErrorCode {
  IllegalTransition,
  ValidationError,
  OversubscribedRequest,
  BackendUnavailable,
  UnknownJob,
  QueueClosed,
  PreconditionViolated,
  StorageFailure,
  MissingSource,
  DuplicateAttachment,
  UnschedulableUnit,
  ImpossibleRequest,
  DoubleRelease,
  MissingTemplate,
  SpawnFailure,
  MissingStagedFile,
  EscapePath,
  MissingOutput,
  UnknownTask,
  InvalidControl,
  ImmutablePast,
  ResourceAcquisitionFailed,
  RecoveryLoop,
  UnknownEntity,
  IllegalHistory,
  PilotNeverActive,
  NoSuchSession,
  Timeout,
};

const char* error_code_name(ErrorCode code);

/// Runtime error carrying a spec-level error code plus a free-form detail
/// string (field name, path, state pair, ...) for callers that dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(std::move(detail)) {}

  Error(ErrorCode code, const std::string& message) : Error(code, "", message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pilotkit
