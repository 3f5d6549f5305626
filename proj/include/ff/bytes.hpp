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

#ifndef FF_BYTES_HPP_
#define FF_BYTES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ff {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Whole-file I/O. Throws IoError on failure.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteSpan data);

// Writes to a sibling temp file, then renames into place, so a failed
// write never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, ByteSpan data);

std::string to_hex(ByteSpan data);

// FNV-1a, used for config fingerprints in layout manifests.
std::uint64_t fnv1a64(ByteSpan data);
std::uint64_t fnv1a64(const std::string& text);

}  // namespace ff

#endif  // FF_BYTES_HPP_
