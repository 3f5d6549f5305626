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

#include "ff/executor.hpp"

#include <fcntl.h>
#include <sched.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <time.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstring>

#include "ff/error.hpp"
#include "proc.hpp"

namespace ff {
namespace fs = std::filesystem;

const char* exec_mode_name(ExecMode mode) {
  return mode == ExecMode::kPersistent ? "persistent" : "fork";
}

const char* exec_status_name(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk:
      return "ok";
    case ExecStatus::kCrash:
      return "crash";
    case ExecStatus::kHang:
      return "hang";
  }
  return "?";
}

bool check_binary(const fs::path& executable) {
  return count_marker_occurrences(executable) > 0;
}

std::size_t count_marker_occurrences(const fs::path& executable) {
  const Bytes blob = read_file(executable);  // IoError if unreadable
  const std::size_t marker_len = sizeof(kPersistentMarker) - 1;
  std::size_t count = 0;
  auto it = blob.begin();
  for (;;) {
    it = std::search(it, blob.end(), kPersistentMarker,
                     kPersistentMarker + marker_len);
    if (it == blob.end()) break;
    ++count;
    ++it;
  }
  return count;
}

// Resident persistent-mode target: shared region plus the process
// attached to it.
struct ExecSession::Resident {
  std::string shm_name;
  PersistentChannel* channel = nullptr;
  pid_t pid = -1;

  ~Resident() {
    if (channel != nullptr) {
      ::munmap(channel, sizeof(PersistentChannel));
    }
    if (!shm_name.empty()) {
      ::shm_unlink(shm_name.c_str());
    }
  }
};

ExecSession::ExecSession(TargetProgram target, SessionOptions options)
    : target_(std::move(target)), options_(std::move(options)) {
  // The synchronization state variable. Requesting persistent mode on a
  // target without the capability downgrades to fork mode, and the
  // downgrade is recorded where every caller can see it.
  is_persistent_ = options_.requested_mode == ExecMode::kPersistent &&
                   check_binary(target_.executable);
  if (options_.requested_mode == ExecMode::kPersistent && !is_persistent_) {
    mode_downgraded_ = true;
    warnings_.push_back(
        "ModeDowngraded: persistent mode requested but " + target_.name +
        " lacks the capability marker; running fork mode (one process per "
        "testcase)");
  }

  if (options_.work_dir.empty()) {
    static std::atomic<std::uint64_t> counter{0};
    work_dir_ = fs::temp_directory_path() /
                ("ff-session-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
    own_work_dir_ = true;
  } else {
    work_dir_ = options_.work_dir;
  }
  fs::create_directories(work_dir_);

  if (is_persistent_) {
    launch_resident();
  }
}

ExecSession::~ExecSession() {
  stop_resident();
  if (own_work_dir_) {
    std::error_code ec;
    fs::remove_all(work_dir_, ec);
  }
}

void ExecSession::launch_resident() {
  auto resident = std::make_unique<Resident>();
  static std::atomic<std::uint64_t> shm_counter{0};
  resident->shm_name = "/ff." + std::to_string(::getpid()) + "." +
                       std::to_string(shm_counter.fetch_add(1));

  const int fd = ::shm_open(resident->shm_name.c_str(),
                            O_CREAT | O_EXCL | O_RDWR, 0600);
  if (fd < 0) throw IoError("shm_open failed for " + resident->shm_name);
  if (::ftruncate(fd, sizeof(PersistentChannel)) != 0) {
    ::close(fd);
    ::shm_unlink(resident->shm_name.c_str());
    throw IoError("ftruncate failed on shared region");
  }
  void* mem = ::mmap(nullptr, sizeof(PersistentChannel),
                     PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  ::close(fd);
  if (mem == MAP_FAILED) {
    ::shm_unlink(resident->shm_name.c_str());
    throw IoError("mmap failed on shared region");
  }
  resident->channel = static_cast<PersistentChannel*>(mem);
  std::memset(resident->channel, 0, sizeof(PersistentChannel));  // IDLE

  proc::SpawnOptions spawn_opts;
  spawn_opts.argv = {target_.executable.string()};
  spawn_opts.env = {
      {kEnvPersistent, "1"},
      {kEnvShmId, resident->shm_name},
      {kEnvCovScheme, options_.scheme == Scheme::kXorHash ? "xor" : "uniform"},
  };
  spawn_opts.unset_env = {kEnvCovFile};
  if (!options_.spawn_count_file.empty()) {
    spawn_opts.env.emplace_back(kEnvSpawnCountFile,
                                options_.spawn_count_file.string());
  } else {
    spawn_opts.unset_env.push_back(kEnvSpawnCountFile);
  }

  try {
    resident->pid = proc::spawn(spawn_opts);
  } catch (const IoError& e) {
    throw SessionBroken(std::string("cannot launch resident target: ") +
                        e.what());
  }

  // Await the initial IDLE with the process alive. A fresh region is
  // already IDLE, so this is primarily a launch-failure probe.
  proc::WaitResult early;
  if (proc::try_reap(resident->pid, &early)) {
    throw SessionBroken("resident target exited during session setup");
  }
  if (resident->channel->load_status() != ChannelStatus::kIdle) {
    throw SessionBroken("shared region not IDLE after launch");
  }
  resident_ = std::move(resident);
}

void ExecSession::stop_resident() {
  if (!resident_) return;
  if (resident_->pid > 0) {
    proc::WaitResult r;
    if (!proc::try_reap(resident_->pid, &r)) {
      resident_->channel->store_status(ChannelStatus::kShutdown);
      // Give it a moment to exit the loop cleanly, then force.
      for (int i = 0; i < 200; ++i) {
        if (proc::try_reap(resident_->pid, &r)) {
          resident_.reset();
          return;
        }
        timespec nap{0, 100 * 1000};
        ::nanosleep(&nap, nullptr);
      }
      proc::kill_and_reap(resident_->pid);
    }
  }
  resident_.reset();
}

ExecResult ExecSession::execute(ByteSpan input) {
  if (input.size() > kPayloadCapacity) {
    throw BoundsError("input of " + std::to_string(input.size()) +
                      " bytes exceeds the " +
                      std::to_string(kPayloadCapacity) +
                      "-byte payload capacity");
  }
  ExecResult result =
      is_persistent_ ? execute_persistent(input) : execute_fork(input);
  ++exec_count_;
  if (result.duration.count() <= 0) result.duration = std::chrono::microseconds(1);
  return result;
}

ExecResult ExecSession::execute_persistent(ByteSpan input) {
  if (!resident_) launch_resident();
  PersistentChannel* chan = resident_->channel;

  const auto start = std::chrono::steady_clock::now();
  chan->input_len = static_cast<std::uint32_t>(input.size());
  if (!input.empty()) std::memcpy(chan->payload, input.data(), input.size());
  chan->store_status(ChannelStatus::kInputReady);

  const auto deadline = start + std::chrono::milliseconds(options_.hang_ms);
  ExecStatus status = ExecStatus::kOk;
  bool need_relaunch = false;
  int spins = 0;
  timespec nap{0, 1000};
  for (;;) {
    if (chan->load_status() == ChannelStatus::kResultReady) {
      break;
    }
    proc::WaitResult dead;
    if (proc::try_reap(resident_->pid, &dead)) {
      status = ExecStatus::kCrash;  // died mid-iteration
      resident_->pid = -1;
      need_relaunch = true;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      status = ExecStatus::kHang;
      proc::kill_and_reap(resident_->pid);
      resident_->pid = -1;
      need_relaunch = true;
      break;
    }
    if (spins < 64) {
      ++spins;
      ::sched_yield();
    } else {
      ::nanosleep(&nap, nullptr);
      if (nap.tv_nsec < 200000) nap.tv_nsec *= 2;
    }
  }

  const auto duration = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);

  // The target instruments straight into the snapshot area, so the map
  // is meaningful for crashes and hangs too: edges up to the fault.
  CoverageMap coverage(options_.scheme);
  coverage.load_cells(chan->coverage, kMapSize);

  if (need_relaunch) {
    resident_.reset();  // unlinks the old region
    launch_resident();  // throws SessionBroken if the target is gone
  } else {
    chan->store_status(ChannelStatus::kIdle);
  }
  return ExecResult{status, std::move(coverage), duration};
}

ExecResult ExecSession::execute_fork(ByteSpan input) {
  RunOnceOptions once;
  once.scheme = options_.scheme;
  once.hang_ms = options_.hang_ms;
  once.scratch_dir = work_dir_;
  once.spawn_count_file = options_.spawn_count_file;
  const RunResult r = run_target_once(target_, input, once);
  return ExecResult{r.status, r.coverage, r.duration};
}

ThroughputReport ExecSession::measure_throughput(
    const std::vector<Bytes>& corpus, double seconds) {
  if (corpus.empty()) throw UsageError("measure_throughput: empty corpus");
  if (seconds <= 0) throw UsageError("measure_throughput: duration must be > 0");

  std::vector<std::uint64_t> latencies;
  latencies.reserve(4096);
  const auto start = std::chrono::steady_clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(seconds));
  std::size_t idx = 0;
  std::uint64_t execs = 0;
  do {
    const ExecResult r = execute(corpus[idx]);
    latencies.push_back(static_cast<std::uint64_t>(r.duration.count()));
    ++execs;
    idx = (idx + 1) % corpus.size();
  } while (std::chrono::steady_clock::now() < deadline);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ThroughputReport report;
  report.execs = execs;
  report.elapsed_sec = elapsed;
  report.execs_per_sec = static_cast<double>(execs) / elapsed;
  std::sort(latencies.begin(), latencies.end());
  auto pct = [&](double p) {
    const std::size_t i = static_cast<std::size_t>(p * (latencies.size() - 1));
    return latencies[i];
  };
  report.latency_p50_us = pct(0.50);
  report.latency_p90_us = pct(0.90);
  report.latency_p99_us = pct(0.99);
  return report;
}

}  // namespace ff
