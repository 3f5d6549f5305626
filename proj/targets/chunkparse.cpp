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
// Toy target: parser for a little binary chunk format.
//
//   input   := magic chunk*
//   magic   := "CHNK"
//   chunk   := type:u8 len:u8 payload:len*u8
//
// Planted faults, for executor and triage testing:
//   - chunk type 0xFF aborts (crash)
//   - chunk type 0xEE with payload starting 0x5A spins forever (hang)
//
// The short-input block (len < 4) is reachable only from inputs shorter
// than the magic, i.e. never from fixed-length mutation of a well-formed
// seed. That makes it a sentinel for variant-length result collection.

#include <cstdlib>

#include "ff_target_rt.hpp"

namespace {

enum Block : std::uint32_t {
  kEntry = 0,
  kShortInput,
  kBadMagic,
  kGoodMagic,
  kChunkHeader,
  kTruncatedPayload,
  kEmptyChunk,
  kTypeData,
  kDataCtrl,
  kDataDigit,
  kDataAlpha,
  kDataOther,
  kTypeU16,
  kU16Zero,
  kU16Small,
  kU16Medium,
  kU16Large,
  kU16Short,
  kTypeStr,
  kStrQuote,
  kStrEscape,
  kStrPlain,
  kTypeNest,
  kNestChild,
  kTypeHang,
  kHangArmed,
  kHangDisarmed,
  kTypeCrash,
  kTypeUnknown,
  kChunkDone,
  kEofClean,
  kBlockCount,
};

using ff::rt::block;

void parse_data(const std::uint8_t* payload, std::size_t len) {
  if (len == 0) return;
  const std::uint8_t first = payload[0];
  if (first < 0x20) {
    block(kDataCtrl);
  } else if (first >= '0' && first <= '9') {
    block(kDataDigit);
  } else if ((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z')) {
    block(kDataAlpha);
  } else {
    block(kDataOther);
  }
}

void parse_u16(const std::uint8_t* payload, std::size_t len) {
  if (len < 2) {
    block(kU16Short);
    return;
  }
  const unsigned value = payload[0] | (unsigned{payload[1]} << 8);
  if (value == 0) {
    block(kU16Zero);
  } else if (value < 256) {
    block(kU16Small);
  } else if (value < 4096) {
    block(kU16Medium);
  } else {
    block(kU16Large);
  }
}

void parse_str(const std::uint8_t* payload, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    if (payload[i] == '"') {
      block(kStrQuote);
    } else if (payload[i] == '\\') {
      block(kStrEscape);
    } else {
      block(kStrPlain);
    }
  }
}

// Nested chunks get their headers classified but not recursed into.
void parse_nest(const std::uint8_t* payload, std::size_t len) {
  std::size_t pos = 0;
  while (pos + 2 <= len) {
    block(kNestChild);
    const std::uint8_t child_len = payload[pos + 1];
    pos += 2 + child_len;
  }
}

void chunkparse_body(const std::uint8_t* data, std::size_t len) {
  block(kEntry);
  if (len < 4) {
    block(kShortInput);
    return;
  }
  if (data[0] != 'C' || data[1] != 'H' || data[2] != 'N' || data[3] != 'K') {
    block(kBadMagic);
    return;
  }
  block(kGoodMagic);

  std::size_t pos = 4;
  while (pos < len) {
    block(kChunkHeader);
    const std::uint8_t type = data[pos];

    if (type == 0xFF) {
      block(kTypeCrash);
      std::abort();  // planted crash
    }

    if (pos + 2 > len) {
      block(kTruncatedPayload);
      return;
    }
    const std::uint8_t chunk_len = data[pos + 1];
    const std::uint8_t* payload = data + pos + 2;
    if (pos + 2 + chunk_len > len) {
      block(kTruncatedPayload);
      return;
    }

    if (chunk_len == 0) block(kEmptyChunk);

    switch (type) {
      case 0x01:
        block(kTypeData);
        parse_data(payload, chunk_len);
        break;
      case 0x02:
        block(kTypeU16);
        parse_u16(payload, chunk_len);
        break;
      case 0x03:
        block(kTypeStr);
        parse_str(payload, chunk_len);
        break;
      case 0x04:
        block(kTypeNest);
        parse_nest(payload, chunk_len);
        break;
      case 0xEE:
        block(kTypeHang);
        if (chunk_len >= 1 && payload[0] == 0x5A) {
          block(kHangArmed);
          // planted hang: spin with no further instrumentation
          for (volatile unsigned spin = 0;;) {
            spin = spin + 1;
          }
        }
        block(kHangDisarmed);
        break;
      default:
        block(kTypeUnknown);
        break;
    }
    block(kChunkDone);
    pos += 2 + chunk_len;
  }
  block(kEofClean);
}

}  // namespace

int main(int argc, char** argv) {
  return ff::rt::target_main(argc, argv, {"chunkparse", kBlockCount},
                             chunkparse_body);
}
