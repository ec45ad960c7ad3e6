// Copyright 2026 The FPA Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpa/sandbox.h"

#include <fcntl.h>
#include <linux/landlock.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/stat.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>

#include "fpa/errors.h"

#ifndef LANDLOCK_ACCESS_FS_REFER
#define LANDLOCK_ACCESS_FS_REFER (1ULL << 13)
#endif
#ifndef LANDLOCK_ACCESS_FS_TRUNCATE
#define LANDLOCK_ACCESS_FS_TRUNCATE (1ULL << 14)
#endif

namespace fpa {
namespace {

constexpr __u64 kWriteAccessAbi1 =
    LANDLOCK_ACCESS_FS_WRITE_FILE | LANDLOCK_ACCESS_FS_REMOVE_DIR |
    LANDLOCK_ACCESS_FS_REMOVE_FILE | LANDLOCK_ACCESS_FS_MAKE_CHAR |
    LANDLOCK_ACCESS_FS_MAKE_DIR | LANDLOCK_ACCESS_FS_MAKE_REG |
    LANDLOCK_ACCESS_FS_MAKE_SOCK | LANDLOCK_ACCESS_FS_MAKE_FIFO |
    LANDLOCK_ACCESS_FS_MAKE_BLOCK | LANDLOCK_ACCESS_FS_MAKE_SYM;

constexpr __u64 kFileOnlyAccess =
    LANDLOCK_ACCESS_FS_WRITE_FILE | LANDLOCK_ACCESS_FS_TRUNCATE;

__u64 HandledWriteAccess(int abi) {
  __u64 access = kWriteAccessAbi1;
  if (abi >= 2) access |= LANDLOCK_ACCESS_FS_REFER;
  if (abi >= 3) access |= LANDLOCK_ACCESS_FS_TRUNCATE;
  return access;
}

int LandlockAbi() {
  long abi = syscall(SYS_landlock_create_ruleset, nullptr, 0,
                     LANDLOCK_CREATE_RULESET_VERSION);
  return abi < 0 ? 0 : static_cast<int>(abi);
}

// Child-side helpers: async-signal-safe only.
void ChildFail(int err_fd, const char* what) {
  int saved = errno;
  (void)!write(err_fd, what, strlen(what));
  const char* detail = strerror(saved);
  (void)!write(err_fd, ": ", 2);
  (void)!write(err_fd, detail, strlen(detail));
  _exit(127);
}

bool WriteProcFile(const char* path, const char* data) {
  int fd = open(path, O_WRONLY | O_CLOEXEC);
  if (fd < 0) return false;
  ssize_t n = write(fd, data, strlen(data));
  close(fd);
  return n == static_cast<ssize_t>(strlen(data));
}

bool EnterNetworkNamespace(const char* uid_map, const char* gid_map) {
  if (unshare(CLONE_NEWNET) == 0) return true;
  if (unshare(CLONE_NEWUSER | CLONE_NEWNET) != 0) return false;
  WriteProcFile("/proc/self/setgroups", "deny");
  return WriteProcFile("/proc/self/uid_map", uid_map) &&
         WriteProcFile("/proc/self/gid_map", gid_map);
}

struct PreparedSpec {
  std::vector<std::string> argv_storage;
  std::vector<std::string> env_storage;
  std::vector<char*> argv;
  std::vector<char*> envp;
  std::vector<std::string> writable;
  std::string cwd;
  std::string uid_map;
  std::string gid_map;
};

void ApplyLandlock(const PreparedSpec& p, int abi, int err_fd) {
  if (abi <= 0) return;
  struct landlock_ruleset_attr attr = {};
  attr.handled_access_fs = HandledWriteAccess(abi);
  int ruleset = static_cast<int>(
      syscall(SYS_landlock_create_ruleset, &attr, sizeof(attr), 0));
  if (ruleset < 0) ChildFail(err_fd, "landlock_create_ruleset");
  auto add_rule = [&](const char* path) {
    int fd = open(path, O_PATH | O_CLOEXEC);
    if (fd < 0) return;
    struct stat st;
    bool is_dir = fstat(fd, &st) == 0 && S_ISDIR(st.st_mode);
    struct landlock_path_beneath_attr rule = {};
    rule.allowed_access = is_dir ? attr.handled_access_fs
                                 : (attr.handled_access_fs & kFileOnlyAccess);
    rule.parent_fd = fd;
    if (syscall(SYS_landlock_add_rule, ruleset, LANDLOCK_RULE_PATH_BENEATH,
                &rule, 0) != 0) {
      ChildFail(err_fd, "landlock_add_rule");
    }
    close(fd);
  };
  for (const auto& w : p.writable) add_rule(w.c_str());
  add_rule("/dev/null");
  if (prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) ChildFail(err_fd, "no_new_privs");
  if (syscall(SYS_landlock_restrict_self, ruleset, 0) != 0) {
    ChildFail(err_fd, "landlock_restrict_self");
  }
  close(ruleset);
}

void SetNonBlocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

const SandboxCapabilities& ProbeSandbox() {
  static SandboxCapabilities caps;
  static std::once_flag once;
  std::call_once(once, [] {
    caps.landlock_abi = LandlockAbi();
    std::string uid_map = "0 " + std::to_string(getuid()) + " 1";
    std::string gid_map = "0 " + std::to_string(getgid()) + " 1";
    pid_t pid = fork();
    if (pid == 0) {
      _exit(EnterNetworkNamespace(uid_map.c_str(), gid_map.c_str()) ? 0 : 1);
    }
    int status = 0;
    if (pid > 0 && waitpid(pid, &status, 0) == pid) {
      caps.network_namespace = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
  });
  return caps;
}

ProcessResult RunProcess(const ProcessSpec& spec) {
  if (spec.argv.empty()) throw UsageError("RunProcess: empty argv");
  const SandboxCapabilities& caps = ProbeSandbox();
  if (spec.deny_network && !caps.network_namespace) {
    throw EnvironmentError(
        "network isolation unavailable: cannot create a network namespace");
  }

  PreparedSpec p;
  p.argv_storage = spec.argv;
  p.env_storage = spec.env;
  for (auto& a : p.argv_storage) p.argv.push_back(a.data());
  p.argv.push_back(nullptr);
  for (auto& e : p.env_storage) p.envp.push_back(e.data());
  p.envp.push_back(nullptr);
  for (const auto& w : spec.writable) p.writable.push_back(w.string());
  p.cwd = spec.working_dir.string();
  p.uid_map = "0 " + std::to_string(getuid()) + " 1";
  p.gid_map = "0 " + std::to_string(getgid()) + " 1";

  int out_pipe[2], err_pipe[2], status_pipe[2];
  if (pipe2(out_pipe, O_CLOEXEC) || pipe2(err_pipe, O_CLOEXEC) ||
      pipe2(status_pipe, O_CLOEXEC)) {
    throw EnvironmentError(std::string("pipe: ") + strerror(errno));
  }

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw EnvironmentError(std::string("fork: ") + strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull < 0 || dup2(devnull, 0) < 0 || dup2(out_pipe[1], 1) < 0 ||
        dup2(err_pipe[1], 2) < 0) {
      ChildFail(status_pipe[1], "redirect");
    }
    if (!p.cwd.empty() && chdir(p.cwd.c_str()) != 0) ChildFail(status_pipe[1], "chdir");
    if (spec.deny_network &&
        !EnterNetworkNamespace(p.uid_map.c_str(), p.gid_map.c_str())) {
      ChildFail(status_pipe[1], "unshare(network)");
    }
    ApplyLandlock(p, caps.landlock_abi, status_pipe[1]);
    execve(p.argv[0], p.argv.data(), p.envp.data());
    ChildFail(status_pipe[1], "execve");
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  close(status_pipe[1]);
  SetNonBlocking(out_pipe[0]);
  SetNonBlocking(err_pipe[0]);

  ProcessResult result;
  std::string* sinks[2] = {&result.stdout_text, &result.stderr_text};
  int fds[2] = {out_pipe[0], err_pipe[0]};
  bool open_fd[2] = {true, true};
  auto deadline = start + spec.timeout;
  char buf[8192];
  while (open_fd[0] || open_fd[1]) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    pollfd pfds[2];
    int n = 0;
    int index[2];
    for (int i = 0; i < 2; ++i) {
      if (open_fd[i]) {
        pfds[n] = {fds[i], POLLIN, 0};
        index[n++] = i;
      }
    }
    int rc = poll(pfds, n, std::max(1, std::min(wait_ms, 100)));
    if (rc < 0 && errno != EINTR) break;
    for (int k = 0; k < n; ++k) {
      if (!(pfds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      int i = index[k];
      ssize_t got = read(fds[i], buf, sizeof(buf));
      if (got > 0) {
        std::string& sink = *sinks[i];
        std::size_t room = spec.max_output > sink.size() ? spec.max_output - sink.size() : 0;
        sink.append(buf, std::min<std::size_t>(room, static_cast<std::size_t>(got)));
        if (static_cast<std::size_t>(got) > room) result.truncated = true;
      } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
        open_fd[i] = false;
      }
    }
  }

  int status = 0;
  if (result.timed_out) {
    waitpid(pid, &status, 0);
  } else {
    // Output closed; wait for exit, still honouring the deadline.
    while (true) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        break;
      }
      usleep(1000);
    }
  }
  // Reap any stragglers left in the group.
  kill(-pid, SIGKILL);
  close(out_pipe[0]);
  close(err_pipe[0]);

  std::string child_error;
  ssize_t got;
  while ((got = read(status_pipe[0], buf, sizeof(buf))) > 0) child_error.append(buf, got);
  close(status_pipe[0]);
  result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  if (!child_error.empty()) {
    throw EnvironmentError("sandboxed launch of '" + spec.argv[0] +
                           "' failed: " + child_error);
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace fpa
