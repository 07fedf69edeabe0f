#include "pilotkit/os/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "pilotkit/core/errors.hpp"

extern char** environ;

namespace pilotkit::os {

namespace {

[[noreturn]] void child_exec(const SpawnSpec& spec, const std::vector<char*>& argv,
                             const std::vector<char*>& envp, int err_fd) {
  // post-fork: async-signal-safe calls only
  if (spec.new_process_group) setpgid(0, 0);
  if (!spec.working_dir.empty() && chdir(spec.working_dir.c_str()) != 0) goto fail;
  if (!spec.stdout_path.empty()) {
    int fd = open(spec.stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0 || dup2(fd, STDOUT_FILENO) < 0) goto fail;
    close(fd);
  }
  if (!spec.stderr_path.empty()) {
    int fd = open(spec.stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0 || dup2(fd, STDERR_FILENO) < 0) goto fail;
    close(fd);
  }
  execve(argv[0], const_cast<char* const*>(argv.data()), const_cast<char* const*>(envp.data()));
fail : {
  int err = errno;
  ssize_t ignored = write(err_fd, &err, sizeof err);
  (void)ignored;
  _exit(127);
}
}

}  // namespace

ChildProcess ChildProcess::spawn(const SpawnSpec& spec) {
  if (spec.argv.empty())
    throw Error(ErrorCode::SpawnFailure, "empty argv");

  std::vector<char*> argv;
  argv.reserve(spec.argv.size() + 1);
  for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  // merged environment, built pre-fork
  std::vector<std::string> env_storage;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    auto key = entry.substr(0, entry.find('='));
    if (!spec.env_overrides.count(key)) env_storage.push_back(std::move(entry));
  }
  for (const auto& [k, v] : spec.env_overrides) env_storage.push_back(k + "=" + v);
  std::vector<char*> envp;
  envp.reserve(env_storage.size() + 1);
  for (auto& e : env_storage) envp.push_back(e.data());
  envp.push_back(nullptr);

  // CLOEXEC pipe reports exec failure back to the parent
  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0)
    throw Error(ErrorCode::SpawnFailure, std::string("pipe2: ") + std::strerror(errno));

  pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw Error(ErrorCode::SpawnFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    close(err_pipe[0]);
    child_exec(spec, argv, envp, err_pipe[1]);
  }
  close(err_pipe[1]);
  int child_errno = 0;
  ssize_t n;
  do {
    n = read(err_pipe[0], &child_errno, sizeof child_errno);
  } while (n < 0 && errno == EINTR);
  close(err_pipe[0]);
  if (n > 0) {
    // exec failed; reap the stillborn child
    int status = 0;
    waitpid(pid, &status, 0);
    throw Error(ErrorCode::SpawnFailure, spec.argv[0],
                "cannot exec " + spec.argv[0] + ": " + std::strerror(child_errno));
  }

  ChildProcess child;
  child.pid_ = pid;
  child.own_group_ = spec.new_process_group;
  return child;
}

std::optional<int> ChildProcess::try_wait() {
  if (reaped_) return exit_code_;
  if (pid_ <= 0) return std::nullopt;
  int status = 0;
  pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == 0) return std::nullopt;
  reaped_ = true;
  if (r < 0) {
    exit_code_ = -1;  // already reaped elsewhere; should not happen
    return exit_code_;
  }
  exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status)
                                 : (WIFSIGNALED(status) ? 128 + WTERMSIG(status) : -1);
  return exit_code_;
}

int ChildProcess::wait() {
  if (reaped_) return exit_code_;
  int status = 0;
  pid_t r;
  do {
    r = waitpid(pid_, &status, 0);
  } while (r < 0 && errno == EINTR);
  reaped_ = true;
  exit_code_ = (r > 0 && WIFEXITED(status))
                   ? WEXITSTATUS(status)
                   : (r > 0 && WIFSIGNALED(status) ? 128 + WTERMSIG(status) : -1);
  return exit_code_;
}

void ChildProcess::terminate() {
  if (pid_ <= 0 || reaped_) return;
  ::kill(own_group_ ? -pid_ : pid_, SIGTERM);
}

void ChildProcess::kill_hard() {
  if (pid_ <= 0 || reaped_) return;
  ::kill(own_group_ ? -pid_ : pid_, SIGKILL);
}

}  // namespace pilotkit::os
