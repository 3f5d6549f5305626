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
// Toy fuzz targets: building them from source in two flavors and running
// them one process per testcase.

#ifndef FF_TARGET_HPP_
#define FF_TARGET_HPP_

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "ff/bytes.hpp"
#include "ff/channel.hpp"
#include "ff/coverage.hpp"

namespace ff {

struct TargetProgram {
  std::string name;  // flavor-qualified, e.g. "chunkparse-persist"
  std::filesystem::path executable;
  std::uint32_t block_count = 0;  // dense instrumented block ids
};

inline constexpr const char* kTargetBaseNames[] = {"chunkparse", "csvish",
                                                   "magic16"};

struct BuildTargetsOptions {
  // Directory holding the target sources; defaults to the location baked
  // in at build time.
  std::filesystem::path source_dir;
  std::string compiler;  // defaults to the compiler this project used
  bool force = false;    // rebuild even when outputs look fresh
};

// Compiles the three toy targets into out_dir, each in two flavors:
// "<name>-persist" (persistent-capable, marker embedded) and
// "<name>-fork" (one process per testcase only). Skips work when the
// output is newer than the sources, so reruns are cheap and idempotent.
// Throws Error on toolchain failure.
std::vector<TargetProgram> build_targets(const std::filesystem::path& out_dir,
                                         const BuildTargetsOptions& options = {});

struct RunOnceOptions {
  Scheme scheme = Scheme::kCollisionFree;
  int hang_ms = 200;
  // Scratch directory for the input and coverage files; a private one is
  // created and removed when empty.
  std::filesystem::path scratch_dir;
  std::filesystem::path spawn_count_file;
};

struct RunResult {
  ExecStatus status;
  CoverageMap coverage;
  std::chrono::microseconds duration;
};

// One fresh process: input delivered as a file path argument, coverage
// read back from the serialized map the target dumps on exit (or from
// its crash/term handler). Throws IoError when the target is missing or
// the input cannot be delivered.
RunResult run_target_once(const TargetProgram& target, ByteSpan input,
                          const RunOnceOptions& options = {});

}  // namespace ff

#endif  // FF_TARGET_HPP_
