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

#ifndef FF_SRC_PROC_HPP_
#define FF_SRC_PROC_HPP_

#include <sys/types.h>

#include <string>
#include <utility>
#include <vector>

namespace ff::proc {

struct SpawnOptions {
  std::vector<std::string> argv;  // argv[0] is the executable path
  // Extra or overriding environment entries, applied over the current
  // environment.
  std::vector<std::pair<std::string, std::string>> env;
  std::vector<std::string> unset_env;
  bool quiet = true;  // route child stdout/stderr to /dev/null
};

// Throws IoError when the process cannot be started.
pid_t spawn(const SpawnOptions& options);

struct WaitResult {
  bool exited = false;
  int exit_code = 0;
  bool signaled = false;
  int term_signal = 0;
  bool timed_out = false;
};

// Waits up to timeout_ms. On timeout sends SIGTERM, grants term_grace_ms
// for the child's coverage dump, then SIGKILLs; the child is always
// reaped before returning.
WaitResult wait_with_timeout(pid_t pid, int timeout_ms, int term_grace_ms = 50);

WaitResult wait_blocking(pid_t pid);

// Nonblocking liveness probe; reaps and reports if the child exited.
bool try_reap(pid_t pid, WaitResult* result);

void kill_and_reap(pid_t pid);

}  // namespace ff::proc

#endif  // FF_SRC_PROC_HPP_
