// Copyright 2026 The FuzzForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "proc.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <string.h>
#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>

#include "ff/error.hpp"

extern char** environ;

namespace ff::proc {
namespace {

// Current environment with overrides applied and unset names removed.
std::vector<std::string> merged_env(const SpawnOptions& options) {
  std::vector<std::string> out;
  auto is_masked = [&](const char* entry) {
    const char* eq = ::strchr(entry, '=');
    const std::size_t name_len = eq ? static_cast<std::size_t>(eq - entry) : ::strlen(entry);
    for (const auto& [name, value] : options.env) {
      (void)value;
      if (name.size() == name_len && ::strncmp(name.c_str(), entry, name_len) == 0)
        return true;
    }
    for (const auto& name : options.unset_env) {
      if (name.size() == name_len && ::strncmp(name.c_str(), entry, name_len) == 0)
        return true;
    }
    return false;
  };
  for (char** e = environ; *e != nullptr; ++e) {
    if (!is_masked(*e)) out.emplace_back(*e);
  }
  for (const auto& [name, value] : options.env) {
    out.push_back(name + "=" + value);
  }
  return out;
}

WaitResult from_status(int status) {
  WaitResult r;
  if (WIFEXITED(status)) {
    r.exited = true;
    r.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    r.signaled = true;
    r.term_signal = WTERMSIG(status);
  }
  return r;
}

}  // namespace

pid_t spawn(const SpawnOptions& options) {
  if (options.argv.empty()) throw UsageError("spawn: empty argv");

  std::vector<std::string> env = merged_env(options);
  std::vector<char*> argv_ptrs;
  for (const auto& a : options.argv) argv_ptrs.push_back(const_cast<char*>(a.c_str()));
  argv_ptrs.push_back(nullptr);
  std::vector<char*> env_ptrs;
  for (const auto& e : env) env_ptrs.push_back(const_cast<char*>(e.c_str()));
  env_ptrs.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  if (options.quiet) {
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
  }

  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, options.argv[0].c_str(), &actions, nullptr,
                               argv_ptrs.data(), env_ptrs.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw IoError("cannot launch " + options.argv[0] + ": " + ::strerror(rc));
  }
  return pid;
}

WaitResult wait_blocking(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw IoError("waitpid failed");
  }
  return from_status(status);
}

bool try_reap(pid_t pid, WaitResult* result) {
  int status = 0;
  const pid_t got = ::waitpid(pid, &status, WNOHANG);
  if (got == pid) {
    if (result != nullptr) *result = from_status(status);
    return true;
  }
  return false;
}

WaitResult wait_with_timeout(pid_t pid, int timeout_ms, int term_grace_ms) {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  timespec nap{0, 50 * 1000};  // 50 us, escalating to 1 ms
  for (;;) {
    WaitResult r;
    if (try_reap(pid, &r)) return r;
    if (Clock::now() >= deadline) break;
    ::nanosleep(&nap, nullptr);
    if (nap.tv_nsec < 1000000) nap.tv_nsec *= 2;
  }

  // Timed out: ask politely so the target can dump coverage, then force.
  ::kill(pid, SIGTERM);
  const auto grace_deadline = Clock::now() + std::chrono::milliseconds(term_grace_ms);
  timespec grace_nap{0, 200 * 1000};
  WaitResult r;
  while (Clock::now() < grace_deadline) {
    if (try_reap(pid, &r)) {
      r.timed_out = true;
      return r;
    }
    ::nanosleep(&grace_nap, nullptr);
  }
  ::kill(pid, SIGKILL);
  r = wait_blocking(pid);
  r.timed_out = true;
  return r;
}

void kill_and_reap(pid_t pid) {
  ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
}

}  // namespace ff::proc
