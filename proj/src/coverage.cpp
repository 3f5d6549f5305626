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

#include "ff/coverage.hpp"

#include <algorithm>
#include <cstring>

#include "ff/error.hpp"

namespace ff {

const char* scheme_name(Scheme scheme) {
  return scheme == Scheme::kXorHash ? "xor-hash" : "collision-free";
}

void CoverageMap::record_edge(std::uint32_t prev, std::uint32_t cur) {
  if (scheme_ != Scheme::kXorHash) {
    throw UsageError("record_edge requires a xor-hash map");
  }
  std::uint8_t& cell = cells_[xor_hash_index(prev, cur)];
  if (cell != 0xff) ++cell;
}

void CoverageMap::record_edge_uniform(std::uint32_t edge_id) {
  if (scheme_ != Scheme::kCollisionFree) {
    throw UsageError("record_edge_uniform requires a collision-free map");
  }
  if (edge_id >= kMapSize) {
    throw BoundsError("edge id " + std::to_string(edge_id) +
                      " out of range (map size " + std::to_string(kMapSize) + ")");
  }
  std::uint8_t& cell = cells_[edge_id];
  if (cell != 0xff) ++cell;
}

std::size_t CoverageMap::count_covered() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells_) n += (c != 0);
  return n;
}

void CoverageMap::merge_from(const CoverageMap& other) {
  if (scheme_ != other.scheme_) {
    throw UsageError("cannot merge maps with different schemes");
  }
  for (std::size_t i = 0; i < kMapSize; ++i) {
    cells_[i] = std::max(cells_[i], other.cells_[i]);
  }
}

bool CoverageMap::gains_from(const CoverageMap& other) const {
  if (scheme_ != other.scheme_) {
    throw UsageError("cannot compare maps with different schemes");
  }
  for (std::size_t i = 0; i < kMapSize; ++i) {
    if (other.cells_[i] != 0 && cells_[i] == 0) return true;
  }
  return false;
}

std::vector<std::uint32_t> CoverageMap::covered_ids() const {
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < kMapSize; ++i) {
    if (cells_[i] != 0) ids.push_back(static_cast<std::uint32_t>(i));
  }
  return ids;
}

void CoverageMap::load_cells(const std::uint8_t* raw, std::size_t len) {
  if (len != kMapSize) {
    throw UsageError("coverage snapshot must be exactly kMapSize bytes");
  }
  std::memcpy(cells_.data(), raw, kMapSize);
}

Bytes CoverageMap::serialize() const {
  Bytes out;
  out.reserve(sizeof(kCovMapMagic) + 1 + 4 + kMapSize);
  out.insert(out.end(), kCovMapMagic, kCovMapMagic + sizeof(kCovMapMagic));
  out.push_back(static_cast<std::uint8_t>(scheme_));
  const auto len = static_cast<std::uint32_t>(kMapSize);
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((len >> (8 * i)) & 0xff));
  }
  out.insert(out.end(), cells_.begin(), cells_.end());
  return out;
}

CoverageMap CoverageMap::deserialize(ByteSpan data) {
  constexpr std::size_t header = sizeof(kCovMapMagic) + 1 + 4;
  if (data.size() < header ||
      std::memcmp(data.data(), kCovMapMagic, sizeof(kCovMapMagic)) != 0) {
    throw IoError("not a coverage map: bad magic");
  }
  const std::uint8_t tag = data[8];
  if (tag > 1) throw IoError("coverage map: unknown scheme tag");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) {
    len |= static_cast<std::uint32_t>(data[9 + i]) << (8 * i);
  }
  if (len != kMapSize || data.size() != header + len) {
    throw IoError("coverage map: bad length");
  }
  CoverageMap map(static_cast<Scheme>(tag));
  map.load_cells(data.data() + header, len);
  return map;
}

void CoverageMap::save(const std::filesystem::path& path) const {
  const Bytes data = serialize();
  write_file_atomic(path, data);
}

CoverageMap CoverageMap::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

CoverageMap merge(const CoverageMap& a, const CoverageMap& b) {
  CoverageMap out = a;
  out.merge_from(b);
  return out;
}

}  // namespace ff
