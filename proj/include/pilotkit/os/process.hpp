#pragma once

#include <sys/types.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pilotkit::os {

struct SpawnSpec {
  std::vector<std::string> argv;  // argv[0] is the executable path
  std::filesystem::path working_dir;
  std::map<std::string, std::string> env_overrides;  // layered over the parent env
  std::filesystem::path stdout_path;
  std::filesystem::path stderr_path;
  bool new_process_group = true;
};

/// A forked child. Wait exactly once; terminate() signals the whole group.
class ChildProcess {
 public:
  ChildProcess() = default;

  /// Throws Error(SpawnFailure) when the executable cannot be exec'd.
  static ChildProcess spawn(const SpawnSpec& spec);

  pid_t pid() const { return pid_; }
  bool valid() const { return pid_ > 0; }

  /// Non-blocking reap. Exit code once; signal deaths map to 128+signo.
  std::optional<int> try_wait();
  int wait();

  void terminate();  // SIGTERM
  void kill_hard();  // SIGKILL

 private:
  pid_t pid_ = -1;
  bool reaped_ = false;
  int exit_code_ = -1;
  bool own_group_ = false;
};

}  // namespace pilotkit::os
