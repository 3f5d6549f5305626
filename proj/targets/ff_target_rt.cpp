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

#include "ff_target_rt.hpp"

#include <fcntl.h>
#include <sched.h>
#include <signal.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <time.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef FF_PERSISTENT_BUILD
// The marker check_binary() scans for. Emitted exactly once, only in
// persistent-capable builds.
__attribute__((used)) static const char kCapabilityMarker[] =
    "##SIG_FF_PERSISTENT##";
#endif

namespace ff::rt {
namespace {

std::uint8_t g_local_map[ff::kMapSize];
std::uint8_t* g_map = g_local_map;
std::uint32_t g_prev_block = 0;
std::uint32_t g_block_count = 1;
bool g_uniform_scheme = true;
int g_cov_fd = -1;

// write() the whole buffer; async-signal-safe.
void write_all(int fd, const void* buf, std::size_t len) {
  const char* p = static_cast<const char*>(buf);
  while (len > 0) {
    ssize_t n = ::write(fd, p, len);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return;
    }
    p += n;
    len -= static_cast<std::size_t>(n);
  }
}

// Serialized-map dump: magic, scheme tag, little-endian length, cells.
// Must stay async-signal-safe; it runs from crash handlers.
void dump_coverage() {
  if (g_cov_fd < 0) return;
  std::uint8_t header[13];
  std::memcpy(header, ff::kCovMapMagic, 8);
  header[8] = g_uniform_scheme ? 1 : 0;
  const std::uint32_t len = ff::kMapSize;
  header[9] = len & 0xff;
  header[10] = (len >> 8) & 0xff;
  header[11] = (len >> 16) & 0xff;
  header[12] = (len >> 24) & 0xff;
  ::lseek(g_cov_fd, 0, SEEK_SET);
  write_all(g_cov_fd, header, sizeof(header));
  write_all(g_cov_fd, g_map, ff::kMapSize);
}

void crash_handler(int sig) {
  dump_coverage();
  ::signal(sig, SIG_DFL);
  ::raise(sig);
}

void term_handler(int) {
  dump_coverage();
  ::_exit(0);
}

void install_handlers() {
  for (int sig : {SIGABRT, SIGSEGV, SIGFPE, SIGILL, SIGBUS}) {
    ::signal(sig, crash_handler);
  }
  ::signal(SIGTERM, term_handler);
}

void count_spawn() {
  const char* path = ::getenv(ff::kEnvSpawnCountFile);
  if (path == nullptr) return;
  int fd = ::open(path, O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) return;
  write_all(fd, "1\n", 2);
  ::close(fd);
}

// Bounded wait on the status word. A single core may run both sides of
// the channel, so yield early instead of burning the quantum.
ChannelStatus await_work(const PersistentChannel* chan) {
  int spins = 0;
  timespec ts{0, 1000};  // 1 us, escalating
  for (;;) {
    ChannelStatus s = chan->load_status();
    if (s == ChannelStatus::kInputReady || s == ChannelStatus::kShutdown) {
      return s;
    }
    if (spins < 64) {
      ++spins;
      ::sched_yield();
    } else {
      ::nanosleep(&ts, nullptr);
      if (ts.tv_nsec < 200000) ts.tv_nsec *= 2;
    }
  }
}

int run_once_from_file(const char* path, TargetBody body) {
  std::uint8_t* data = nullptr;
  std::size_t len = 0;
  if (path != nullptr) {
    int fd = ::open(path, O_RDONLY);
    if (fd < 0) {
      std::fprintf(stderr, "cannot open input: %s\n", path);
      return 96;
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      return 96;
    }
    len = static_cast<std::size_t>(st.st_size);
    data = static_cast<std::uint8_t*>(std::malloc(len > 0 ? len : 1));
    std::size_t got = 0;
    while (got < len) {
      ssize_t n = ::read(fd, data + got, len - got);
      if (n <= 0) break;
      got += static_cast<std::size_t>(n);
    }
    ::close(fd);
    len = got;
  }
  reset_iteration();
  body(data, len);
  dump_coverage();
  std::free(data);
  return 0;
}

}  // namespace

void block(std::uint32_t id) {
  std::size_t index;
  if (g_uniform_scheme) {
    index = static_cast<std::size_t>(g_prev_block) * g_block_count + id;
  } else {
    index = id ^ (g_prev_block >> 1);
  }
  index &= ff::kMapSize - 1;
  if (g_map[index] != 0xff) ++g_map[index];
  g_prev_block = id;
}

void reset_iteration() {
  std::memset(g_map, 0, ff::kMapSize);
  g_prev_block = 0;
}

std::uint64_t persistent_loop(PersistentChannel* channel,
                              std::uint64_t max_iters, TargetBody body) {
  std::uint8_t* saved_map = g_map;
  g_map = channel->coverage;  // instrumentation writes straight into the
                              // snapshot area, so a mid-body crash still
                              // leaves the edges seen so far readable
  std::uint64_t iters = 0;
  while (iters < max_iters) {
    ChannelStatus s = await_work(channel);
    if (s == ChannelStatus::kShutdown) break;
    reset_iteration();
    std::uint32_t len = channel->input_len;
    if (len > kPayloadCapacity) len = kPayloadCapacity;
    body(channel->payload, len);
    channel->exec_status = static_cast<std::uint32_t>(ExecStatus::kOk);
    channel->store_status(ChannelStatus::kResultReady);
    ++iters;
  }
  g_map = saved_map;
  return iters;
}

int target_main(int argc, char** argv, const TargetInfo& info, TargetBody body) {
  g_block_count = info.block_count > 0 ? info.block_count : 1;

  if (argc > 1 && std::strcmp(argv[1], "--ff-blocks") == 0) {
    std::printf("%s %u\n", info.name, info.block_count);
    return 0;
  }

  count_spawn();

  const char* scheme = ::getenv(kEnvCovScheme);
  g_uniform_scheme = (scheme == nullptr || std::strcmp(scheme, "xor") != 0);

  const char* cov_path = ::getenv(kEnvCovFile);
  if (cov_path != nullptr) {
    g_cov_fd = ::open(cov_path, O_WRONLY | O_CREAT | O_TRUNC, 0644);
  }
  install_handlers();

#ifdef FF_PERSISTENT_BUILD
  const char* persistent = ::getenv(kEnvPersistent);
  const char* shm_id = ::getenv(kEnvShmId);
  if (persistent != nullptr && std::strcmp(persistent, "1") == 0 &&
      shm_id != nullptr) {
    int fd = ::shm_open(shm_id, O_RDWR, 0600);
    if (fd < 0) {
      std::fprintf(stderr, "cannot attach shared region %s\n", shm_id);
      return 95;
    }
    void* mem = ::mmap(nullptr, sizeof(PersistentChannel),
                       PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
    ::close(fd);
    if (mem == MAP_FAILED) return 95;
    auto* channel = static_cast<PersistentChannel*>(mem);
    persistent_loop(channel, ~0ULL, body);
    return 0;
  }
#endif

  return run_once_from_file(argc > 1 ? argv[1] : nullptr, body);
}

}  // namespace ff::rt
