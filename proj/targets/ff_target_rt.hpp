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
// Runtime compiled into every toy fuzz target. Provides block-level
// coverage instrumentation, coverage dumping for one-shot (fork-mode)
// runs, and — in builds with FF_PERSISTENT_BUILD defined — the
// shared-memory persistent loop plus the capability marker the fuzzer's
// check_binary() looks for.

#ifndef FF_TARGET_RT_HPP_
#define FF_TARGET_RT_HPP_

#include <cstddef>
#include <cstdint>

#include "ff/channel.hpp"

namespace ff::rt {

using TargetBody = void (*)(const std::uint8_t* data, std::size_t len);

struct TargetInfo {
  const char* name;
  std::uint32_t block_count;  // dense block ids 0..block_count-1
};

// Records entry into the basic block with the given compile-time id.
// Under the collision-free scheme the (prev, cur) pair maps to the
// statically determined id prev * block_count + cur; under the xor-hash
// scheme it maps to (cur ^ (prev >> 1)) mod map size.
void block(std::uint32_t id);

// Clears the live map and the previous-block register. Called by the
// persistent loop before every iteration and by target_main before a
// one-shot run.
void reset_iteration();

// Runs the channel protocol: for each iteration, waits for INPUT_READY,
// runs `body` exactly once on the payload with a fresh coverage map,
// publishes exec status and snapshot, and sets RESULT_READY. Stops at
// `max_iters` or on SHUTDOWN. Returns iterations completed.
std::uint64_t persistent_loop(ff::PersistentChannel* channel,
                              std::uint64_t max_iters, TargetBody body);

// Entry point shared by all targets: handles the handshake environment,
// spawn accounting, coverage dumping, and --ff-blocks introspection.
// Without the handshake (or in builds lacking persistent support) the
// body runs at most once and the process exits.
int target_main(int argc, char** argv, const TargetInfo& info, TargetBody body);

}  // namespace ff::rt

#endif  // FF_TARGET_RT_HPP_
