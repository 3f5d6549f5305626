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
//
// Fuzzer-side execution sessions. A session binds one target to one
// execution mode:
//
//   Persistent  one resident process, testcases through shared memory.
//   Fork        one process per testcase, testcases through temp files.
//
// Whether persistent mode actually engages is decided in exactly one
// place, the session constructor:
//
//   is_persistent = (requested mode == Persistent) && check_binary(target)
//
// and a request that cannot be honored is downgraded loudly, never
// silently: the session carries a ModeDowngraded warning that callers
// are expected to surface.

#ifndef FF_EXECUTOR_HPP_
#define FF_EXECUTOR_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ff/bytes.hpp"
#include "ff/channel.hpp"
#include "ff/coverage.hpp"
#include "ff/target.hpp"

namespace ff {

// Needle check_binary() scans target executables for. Persistent-capable
// builds embed the same byte string exactly once.
inline constexpr const char kPersistentMarker[] = "##SIG_FF_PERSISTENT##";

// True iff the capability marker occurs in the executable's bytes.
// An unreadable file is an IoError, not `false`.
bool check_binary(const std::filesystem::path& executable);

// Number of marker occurrences; build verification wants "exactly once".
std::size_t count_marker_occurrences(const std::filesystem::path& executable);

enum class ExecMode { kPersistent, kFork };

const char* exec_mode_name(ExecMode mode);

struct SessionOptions {
  ExecMode requested_mode = ExecMode::kFork;
  Scheme scheme = Scheme::kCollisionFree;
  int hang_ms = 200;
  // Scratch directory; a private one is created (and removed) if empty.
  std::filesystem::path work_dir;
  // When set, every target process launch appends a line to this file.
  std::filesystem::path spawn_count_file;
};

struct ExecResult {
  ExecStatus status;
  CoverageMap coverage;
  std::chrono::microseconds duration;
};

struct ThroughputReport {
  std::uint64_t execs = 0;
  double elapsed_sec = 0;
  double execs_per_sec = 0;
  std::uint64_t latency_p50_us = 0;
  std::uint64_t latency_p90_us = 0;
  std::uint64_t latency_p99_us = 0;
};

class ExecSession {
 public:
  ExecSession(TargetProgram target, SessionOptions options);
  ~ExecSession();
  ExecSession(const ExecSession&) = delete;
  ExecSession& operator=(const ExecSession&) = delete;

  bool is_persistent() const { return is_persistent_; }
  ExecMode requested_mode() const { return options_.requested_mode; }
  ExecMode effective_mode() const {
    return is_persistent_ ? ExecMode::kPersistent : ExecMode::kFork;
  }
  bool mode_downgraded() const { return mode_downgraded_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const TargetProgram& target() const { return target_; }
  Scheme scheme() const { return options_.scheme; }
  int hang_ms() const { return options_.hang_ms; }
  std::uint64_t exec_count() const { return exec_count_; }

  // Runs one testcase. Persistent path: payload into shared memory,
  // INPUT_READY, await RESULT_READY. Fork path: temp file plus one
  // process. A crash or hang of the resident process is reported in the
  // result and the process is relaunched; the next execute() works.
  // Throws BoundsError for inputs over the payload capacity and
  // SessionBroken when the resident target cannot be revived.
  ExecResult execute(ByteSpan input);

  // Round-robins the corpus until the wall clock expires. Steady-state
  // only: session setup happened in the constructor and is not counted.
  ThroughputReport measure_throughput(const std::vector<Bytes>& corpus,
                                      double seconds);

 private:
  struct Resident;

  ExecResult execute_persistent(ByteSpan input);
  ExecResult execute_fork(ByteSpan input);
  void launch_resident();
  void stop_resident();

  TargetProgram target_;
  SessionOptions options_;
  bool is_persistent_ = false;
  bool mode_downgraded_ = false;
  std::vector<std::string> warnings_;
  std::uint64_t exec_count_ = 0;
  std::filesystem::path work_dir_;
  bool own_work_dir_ = false;
  std::unique_ptr<Resident> resident_;
};

}  // namespace ff

#endif  // FF_EXECUTOR_HPP_
