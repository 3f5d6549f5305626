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
// Wire contract for the persistent-mode testcase channel, shared between
// the fuzzer process and the instrumented target. Byte-exact layout,
// little-endian:
//
//   offset 0   status word        (4 bytes)
//   offset 4   exec status        (4 bytes)
//   offset 8   input length       (4 bytes)
//   offset 12  reserved           (4 bytes)
//   offset 16  input payload      (1 MiB capacity)
//   offset 16 + 1 MiB  coverage snapshot (kMapSize bytes)
//
// One producer (the fuzzer) and one consumer (the target). The status
// word only ever moves IDLE -> INPUT_READY -> RESULT_READY -> IDLE, or
// to SHUTDOWN. Synchronization is the status word alone, with bounded
// yield-then-sleep waiting; no semaphores are part of the contract.

#ifndef FF_CHANNEL_HPP_
#define FF_CHANNEL_HPP_

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>

#include "ff/coverage.hpp"

namespace ff {

static_assert(std::endian::native == std::endian::little,
              "channel layout is defined little-endian");

inline constexpr std::size_t kPayloadCapacity = 1 << 20;  // 1 MiB

enum class ChannelStatus : std::uint32_t {
  kIdle = 0,
  kInputReady = 1,
  kResultReady = 2,
  kShutdown = 3,
};

enum class ExecStatus : std::uint32_t {
  kOk = 0,
  kCrash = 1,
  kHang = 2,
};

const char* exec_status_name(ExecStatus status);

struct PersistentChannel {
  std::uint32_t status;
  std::uint32_t exec_status;
  std::uint32_t input_len;
  std::uint32_t reserved;
  std::uint8_t payload[kPayloadCapacity];
  std::uint8_t coverage[kMapSize];

  ChannelStatus load_status() const {
    return static_cast<ChannelStatus>(
        std::atomic_ref<const std::uint32_t>(status).load(std::memory_order_acquire));
  }
  void store_status(ChannelStatus s) {
    std::atomic_ref<std::uint32_t>(status).store(static_cast<std::uint32_t>(s),
                                                 std::memory_order_release);
  }
};

static_assert(offsetof(PersistentChannel, status) == 0);
static_assert(offsetof(PersistentChannel, exec_status) == 4);
static_assert(offsetof(PersistentChannel, input_len) == 8);
static_assert(offsetof(PersistentChannel, payload) == 16);
static_assert(offsetof(PersistentChannel, coverage) == 16 + kPayloadCapacity);
static_assert(sizeof(PersistentChannel) == 16 + kPayloadCapacity + kMapSize);

// Environment variables making up the fuzzer <-> target handshake.
// The capability marker itself is defined only where it is embedded
// (persistent-capable target builds) and where it is searched for
// (executor.hpp), so that fork-only binaries can never pick it up from
// a shared header.
inline constexpr const char* kEnvPersistent = "FF_PERSISTENT";
inline constexpr const char* kEnvShmId = "FF_SHM_ID";
inline constexpr const char* kEnvCovFile = "FF_COV_FILE";
inline constexpr const char* kEnvCovScheme = "FF_COV_SCHEME";
inline constexpr const char* kEnvSpawnCountFile = "FF_SPAWN_COUNT_FILE";

}  // namespace ff

#endif  // FF_CHANNEL_HPP_
