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
// Edge coverage maps. Two indexing schemes live behind one container:
//
//   XorHash       AFL-style `cur ^ (prev >> 1)` hashing into a fixed map.
//                 Cheap, but distinct edges can land on the same cell.
//   CollisionFree one cell per static edge id, so counting covered cells
//                 counts real edges. This is the uniform metric every
//                 evaluation in this project reports.

#ifndef FF_COVERAGE_HPP_
#define FF_COVERAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ff/bytes.hpp"

namespace ff {

// Map size, power of two. Shared by both schemes and by the target-side
// runtime; the shared-memory channel reserves exactly this many bytes
// for the per-execution snapshot.
inline constexpr std::size_t kMapSize = 65536;

// 8-byte magic prefixing every serialized map.
inline constexpr char kCovMapMagic[8] = {'F', 'F', 'C', 'O', 'V', 'M', 'A', 'P'};

enum class Scheme : std::uint8_t {
  kXorHash = 0,
  kCollisionFree = 1,
};

const char* scheme_name(Scheme scheme);

// Hash of a control-flow edge into the map index space. The prev-label
// shift breaks the A->B vs B->A symmetry. Distinct edges may collide.
inline std::uint32_t xor_hash_index(std::uint32_t prev, std::uint32_t cur) {
  return (cur ^ (prev >> 1)) & static_cast<std::uint32_t>(kMapSize - 1);
}

// Fixed-size array of saturating 8-bit hit counters.
class CoverageMap {
 public:
  explicit CoverageMap(Scheme scheme)
      : scheme_(scheme), cells_(kMapSize, 0) {}

  Scheme scheme() const { return scheme_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  // Hashed recording; requires Scheme::kXorHash.
  void record_edge(std::uint32_t prev, std::uint32_t cur);

  // Direct recording at a statically assigned edge id; requires
  // Scheme::kCollisionFree and edge_id < kMapSize.
  void record_edge_uniform(std::uint32_t edge_id);

  // Number of cells with a nonzero counter.
  std::size_t count_covered() const;

  // Cell-wise saturating maximum. Schemes must match.
  void merge_from(const CoverageMap& other);

  // True if `other` has a nonzero cell where this map has none.
  bool gains_from(const CoverageMap& other) const;

  // Indices of nonzero cells, ascending.
  std::vector<std::uint32_t> covered_ids() const;

  std::uint8_t cell(std::size_t i) const { return cells_[i]; }
  bool empty() const { return count_covered() == 0; }

  // Replaces cell contents from a raw snapshot of kMapSize bytes.
  void load_cells(const std::uint8_t* raw, std::size_t len);

  bool operator==(const CoverageMap& other) const = default;

  // Wire format: 8-byte magic, 1-byte scheme tag, 4-byte little-endian
  // cell count, then the raw cells. Bit-exact across platforms.
  Bytes serialize() const;
  static CoverageMap deserialize(ByteSpan data);

  void save(const std::filesystem::path& path) const;
  static CoverageMap load(const std::filesystem::path& path);

 private:
  Scheme scheme_;
  std::vector<std::uint8_t> cells_;
};

CoverageMap merge(const CoverageMap& a, const CoverageMap& b);

}  // namespace ff

#endif  // FF_COVERAGE_HPP_
