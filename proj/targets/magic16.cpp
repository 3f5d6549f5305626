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
// Toy target: a 16-byte key gate built to reward byte-level guidance.
//
// For every key position the input byte's distance to the key byte is
// classified against a nested threshold chain (96, 64, 32, ..., 1, 0),
// each satisfied threshold producing a distinct edge for that byte; a
// direction branch (>= / <) separates approaching from overshooting.
// Matching a prefix of the key walks a ladder with per-level branches,
// and the full key unlocks a final fan keyed on the first tail byte.
//
// Coverage is therefore monotone in per-byte closeness: stepping a byte
// toward its key value keeps every edge it had and adds new ones.

#include "ff_target_rt.hpp"

namespace {

enum Block : std::uint32_t {
  kEntry = 0,
  kEmptyInput,
  kHasTail,
  kNoTail,
  kThreshold0,  // 14 consecutive ids, one per entry of kThresholds
  kGreaterEq = kThreshold0 + 14,
  kLess,
  kLevel,
  kTailEven,
  kTailOdd,
  kBonusDone,
  kByteMark0,  // 16 consecutive ids, one per key position
  kBonusSel0 = kByteMark0 + 16,  // 8 consecutive ids
  kBlockCount = kBonusSel0 + 8,
};

// None of these values is producible from a zero byte by single-shot
// bit flips, +-35 arithmetic, or the interesting-value table, so the
// exact matches have to be navigated to, not stumbled on during
// deterministic collection.
constexpr std::uint8_t kKey[16] = {
    0x66, 0x7A, 0x52, 0x8E, 0x61, 0x9B, 0x47, 0x85,
    0x5D, 0xA3, 0x6E, 0x91, 0x58, 0x79, 0x8C, 0x63,
};

// Nested distance thresholds. Adjacent levels are close enough that a
// step from {1, 16, 64} always reaches the next one.
constexpr int kThresholds[14] = {96, 64, 32, 16, 12, 8, 7, 6, 5, 4, 3, 2, 1, 0};

using ff::rt::block;

void magic16_body(const std::uint8_t* data, std::size_t len) {
  block(kEntry);
  if (len == 0) {
    block(kEmptyInput);
    return;
  }
  block(len > 16 ? kHasTail : kNoTail);

  for (std::uint32_t i = 0; i < 16; ++i) {
    const int v = i < len ? data[i] : 0;
    const int key = kKey[i];
    block(kByteMark0 + i);
    block(v >= key ? kGreaterEq : kLess);
    const int dist = v >= key ? v - key : key - v;
    for (std::uint32_t t = 0; t < 14; ++t) {
      if (dist > kThresholds[t]) break;
      // Interleave the byte marker so each (byte, threshold) pair is a
      // distinct edge rather than a shared threshold->threshold one.
      block(kByteMark0 + i);
      block(kThreshold0 + t);
    }
  }

  std::uint32_t depth = 0;
  while (depth < 16) {
    const std::uint8_t v = depth < len ? data[depth] : 0;
    if (v != kKey[depth]) break;
    block(kByteMark0 + depth);
    block(kLevel);
    const std::uint8_t tail = 16 + depth < len ? data[16 + depth] : 0;
    block(kByteMark0 + depth);
    block((tail & 1) != 0 ? kTailOdd : kTailEven);
    ++depth;
  }

  if (depth == 16) {
    const std::uint8_t tail0 = len > 16 ? data[16] : 0;
    block(kBonusSel0 + (tail0 & 7));
    block(kBonusDone);
  }
}

}  // namespace

int main(int argc, char** argv) {
  return ff::rt::target_main(argc, argv, {"magic16", kBlockCount}, magic16_body);
}
