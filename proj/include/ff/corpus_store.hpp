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
// On-disk campaign results. Four directories under one root:
//
//   NEUZZ_out/  fixed-length testcases that covered a new edge
//   vari_seed/  variant-length testcases that covered a new edge
//   crash/      crashing testcases
//   hang/       testcases over the hang threshold
//
// Evaluation must enumerate all four; enumerating only the queue
// undercounts coverage whenever a variant-length testcase reaches code
// that no fixed-length one does, so the queue-only selection exists
// solely for regression tests and warns when used.

#ifndef FF_CORPUS_STORE_HPP_
#define FF_CORPUS_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ff/bytes.hpp"

namespace ff {

enum class Disposition {
  kNewEdgeFixed,
  kNewEdgeVariant,
  kCrash,
  kHang,
};

const char* disposition_dir_name(Disposition d);

struct TestCase {
  Bytes data;
  std::uint64_t parent_id = 0;  // saved-counter of the parent, 0 = none
  std::string mutation_kind = "seed";
  bool variant_length = false;  // length differs from the parent's
};

struct StoredTestCase {
  std::uint64_t id = 0;
  std::uint64_t parent_id = 0;
  std::string mutation_kind;
  Disposition disposition = Disposition::kNewEdgeFixed;
  std::filesystem::path path;

  Bytes load() const { return read_file(path); }
};

class OutputLayout {
 public:
  enum class Selection { kAll, kQueueOnly };

  // Creates the four directories (idempotently) and a fresh manifest.
  // Existing saved testcases under the root are cleared so a rerun
  // starts clean without manual cleanup.
  static OutputLayout create(const std::filesystem::path& root);

  // Opens an existing layout. Throws StructuralError naming the first
  // missing directory.
  static OutputLayout open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path dir(Disposition d) const;

  // Writes the testcase bytes under the directory the disposition
  // routes to and bumps the counter. Returns the saved path. Uses a
  // temp-then-rename write so failures leave no partial file.
  std::filesystem::path save_testcase(const TestCase& tc, Disposition d);

  std::uint64_t counter() const { return counter_; }

  // Testcases in saved (counter) order. kQueueOnly exists to reproduce
  // queue-only result collection and appends a deprecation warning.
  std::vector<StoredTestCase> enumerate(
      Selection selection, std::vector<std::string>* warnings = nullptr) const;

  // Free-form manifest entries (campaign mode, config hash, ...) stored
  // in layout.meta next to the counter.
  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> meta(const std::string& key) const;
  void write_meta() const;

 private:
  explicit OutputLayout(std::filesystem::path root) : root_(std::move(root)) {}
  void load_meta();

  std::filesystem::path root_;
  std::uint64_t counter_ = 0;
  std::map<std::string, std::string> meta_;
};

}  // namespace ff

#endif  // FF_CORPUS_STORE_HPP_
