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

#include "ff/target.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstring>

#include "ff/error.hpp"
#include "proc.hpp"

#ifndef FF_SOURCE_ROOT
#define FF_SOURCE_ROOT "."
#endif
#ifndef FF_CXX_COMPILER
#define FF_CXX_COMPILER "c++"
#endif

namespace ff {
namespace fs = std::filesystem;

namespace {

fs::file_time_type newest_mtime(const std::vector<fs::path>& paths) {
  fs::file_time_type newest = fs::file_time_type::min();
  for (const auto& p : paths) {
    std::error_code ec;
    const auto t = fs::last_write_time(p, ec);
    if (!ec && t > newest) newest = t;
  }
  return newest;
}

// Queries "<exe> --ff-blocks", which prints "<name> <block-count>".
std::uint32_t query_block_count(const fs::path& exe) {
  const std::string cmd = "'" + exe.string() + "' --ff-blocks";
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return 0;
  char buf[256] = {0};
  const bool got = std::fgets(buf, sizeof(buf), pipe) != nullptr;
  ::pclose(pipe);
  if (!got) return 0;
  unsigned count = 0;
  char name[128] = {0};
  if (std::sscanf(buf, "%127s %u", name, &count) != 2) return 0;
  return count;
}

void compile_target(const std::string& compiler, const fs::path& source_dir,
                    const fs::path& include_dir, const std::string& base,
                    bool persistent, const fs::path& out) {
  const fs::path tmp = out.string() + ".tmp." + std::to_string(::getpid());
  std::vector<std::string> argv = {
      compiler,
      "-std=c++20",
      "-O1",
      "-I",
      include_dir.string(),
      (source_dir / (base + ".cpp")).string(),
      (source_dir / "ff_target_rt.cpp").string(),
      "-o",
      tmp.string(),
      "-lrt",
  };
  if (persistent) argv.insert(argv.begin() + 3, "-DFF_PERSISTENT_BUILD");

  proc::SpawnOptions spawn_opts;
  spawn_opts.argv = argv;
  spawn_opts.quiet = false;  // surface compiler diagnostics
  const pid_t pid = proc::spawn(spawn_opts);
  const proc::WaitResult r = proc::wait_blocking(pid);
  if (!r.exited || r.exit_code != 0) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw Error("target build failed for " + base +
                (persistent ? " (persistent flavor)" : " (fork flavor)"));
  }
  std::error_code ec;
  fs::rename(tmp, out, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move built target into place: " + out.string());
  }
}

}  // namespace

std::vector<TargetProgram> build_targets(const fs::path& out_dir,
                                         const BuildTargetsOptions& options) {
  const fs::path source_dir = options.source_dir.empty()
                                  ? fs::path(FF_SOURCE_ROOT) / "targets"
                                  : options.source_dir;
  const fs::path include_dir = source_dir.parent_path() / "include";
  const std::string compiler =
      options.compiler.empty() ? FF_CXX_COMPILER : options.compiler;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  std::vector<TargetProgram> built;
  for (const char* base : kTargetBaseNames) {
    const std::vector<fs::path> deps = {
        source_dir / (std::string(base) + ".cpp"),
        source_dir / "ff_target_rt.cpp",
        source_dir / "ff_target_rt.hpp",
        include_dir / "ff" / "channel.hpp",
        include_dir / "ff" / "coverage.hpp",
        include_dir / "ff" / "bytes.hpp",
    };
    if (!fs::exists(deps[0])) {
      throw IoError("target source not found: " + deps[0].string());
    }
    const auto src_time = newest_mtime(deps);

    for (bool persistent : {true, false}) {
      const std::string name =
          std::string(base) + (persistent ? "-persist" : "-fork");
      const fs::path out = out_dir / name;
      bool fresh = !options.force && fs::exists(out);
      if (fresh) {
        std::error_code mec;
        const auto out_time = fs::last_write_time(out, mec);
        fresh = !mec && out_time > src_time;
      }
      if (!fresh) {
        compile_target(compiler, source_dir, include_dir, base, persistent, out);
      }
      built.push_back(TargetProgram{name, out, query_block_count(out)});
    }
  }
  return built;
}

RunResult run_target_once(const TargetProgram& target, ByteSpan input,
                          const RunOnceOptions& options) {
  if (!fs::exists(target.executable)) {
    throw IoError("target executable missing: " + target.executable.string());
  }

  fs::path scratch = options.scratch_dir;
  bool own_scratch = false;
  if (scratch.empty()) {
    static std::atomic<std::uint64_t> counter{0};
    scratch = fs::temp_directory_path() /
              ("ff-once-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter.fetch_add(1)));
    fs::create_directories(scratch);
    own_scratch = true;
  }

  const fs::path input_path = scratch / "input.bin";
  const fs::path cov_path = scratch / "cov.bin";
  write_file(input_path, input);
  std::error_code ec;
  fs::remove(cov_path, ec);

  proc::SpawnOptions spawn_opts;
  spawn_opts.argv = {target.executable.string(), input_path.string()};
  spawn_opts.env = {
      {kEnvCovFile, cov_path.string()},
      {kEnvCovScheme, options.scheme == Scheme::kXorHash ? "xor" : "uniform"},
  };
  spawn_opts.unset_env = {kEnvPersistent, kEnvShmId};
  if (!options.spawn_count_file.empty()) {
    spawn_opts.env.emplace_back(kEnvSpawnCountFile,
                                options.spawn_count_file.string());
  } else {
    spawn_opts.unset_env.push_back(kEnvSpawnCountFile);
  }

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = proc::spawn(spawn_opts);
  const proc::WaitResult wait = proc::wait_with_timeout(pid, options.hang_ms);
  auto duration = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  if (duration.count() <= 0) duration = std::chrono::microseconds(1);

  RunResult result{ExecStatus::kOk, CoverageMap(options.scheme), duration};
  if (wait.timed_out) {
    result.status = ExecStatus::kHang;
  } else if (wait.signaled) {
    result.status = ExecStatus::kCrash;
  } else if (wait.exited && wait.exit_code == 96) {
    throw IoError("target could not read its input file");
  } else if (wait.exited && wait.exit_code != 0) {
    result.status = ExecStatus::kCrash;
  }

  if (fs::exists(cov_path)) {
    result.coverage = CoverageMap::load(cov_path);
    if (result.coverage.scheme() != options.scheme) {
      throw IoError("target dumped a coverage map with the wrong scheme");
    }
  }

  if (own_scratch) {
    fs::remove_all(scratch, ec);
  }
  return result;
}

}  // namespace ff
