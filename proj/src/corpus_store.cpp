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

#include "ff/corpus_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ff/error.hpp"

namespace ff {
namespace fs = std::filesystem;

namespace {

constexpr const char* kMetaFile = "layout.meta";

const Disposition kAllDispositions[] = {
    Disposition::kNewEdgeFixed,
    Disposition::kNewEdgeVariant,
    Disposition::kCrash,
    Disposition::kHang,
};

std::string format_name(std::uint64_t id, std::uint64_t parent,
                        const std::string& kind) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "id:%06llu,src:%06llu,op:",
                static_cast<unsigned long long>(id),
                static_cast<unsigned long long>(parent));
  return std::string(buf) + kind;
}

bool parse_name(const std::string& name, std::uint64_t* id,
                std::uint64_t* parent, std::string* kind) {
  unsigned long long id_v = 0;
  unsigned long long parent_v = 0;
  int kind_pos = -1;
  if (std::sscanf(name.c_str(), "id:%6llu,src:%6llu,op:%n", &id_v, &parent_v,
                  &kind_pos) < 2 ||
      kind_pos < 0) {
    return false;
  }
  *id = id_v;
  *parent = parent_v;
  *kind = name.substr(static_cast<std::size_t>(kind_pos));
  return true;
}

}  // namespace

const char* disposition_dir_name(Disposition d) {
  switch (d) {
    case Disposition::kNewEdgeFixed:
      return "NEUZZ_out";
    case Disposition::kNewEdgeVariant:
      return "vari_seed";
    case Disposition::kCrash:
      return "crash";
    case Disposition::kHang:
      return "hang";
  }
  return "?";
}

fs::path OutputLayout::dir(Disposition d) const {
  return root_ / disposition_dir_name(d);
}

OutputLayout OutputLayout::create(const fs::path& root) {
  OutputLayout layout(root);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create layout root: " + root.string());
  for (Disposition d : kAllDispositions) {
    const fs::path p = layout.dir(d);
    fs::remove_all(p, ec);
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create layout directory: " + p.string());
  }
  layout.counter_ = 0;
  layout.meta_.clear();
  layout.write_meta();
  return layout;
}

OutputLayout OutputLayout::open(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw StructuralError("layout root missing: " + root.string());
  }
  OutputLayout layout(root);
  for (Disposition d : kAllDispositions) {
    if (!fs::is_directory(layout.dir(d))) {
      throw StructuralError("layout directory missing: " +
                            layout.dir(d).string());
    }
  }
  layout.load_meta();
  return layout;
}

fs::path OutputLayout::save_testcase(const TestCase& tc, Disposition d) {
  const std::uint64_t id = counter_ + 1;
  const fs::path target =
      dir(d) / format_name(id, tc.parent_id, tc.mutation_kind);
  write_file_atomic(target, tc.data);  // IoError leaves no partial file
  counter_ = id;
  write_meta();
  return target;
}

std::vector<StoredTestCase> OutputLayout::enumerate(
    Selection selection, std::vector<std::string>* warnings) const {
  if (selection == Selection::kQueueOnly && warnings != nullptr) {
    warnings->push_back(
        "deprecated: queue-only enumeration skips vari_seed, crash and hang; "
        "coverage replayed from it undercounts");
  }
  std::vector<StoredTestCase> out;
  for (Disposition d : kAllDispositions) {
    if (selection == Selection::kQueueOnly && d != Disposition::kNewEdgeFixed) {
      continue;
    }
    const fs::path p = dir(d);
    if (!fs::is_directory(p)) {
      throw StructuralError("layout directory missing: " + p.string());
    }
    for (const auto& entry : fs::directory_iterator(p)) {
      if (!entry.is_regular_file()) continue;
      StoredTestCase tc;
      if (!parse_name(entry.path().filename().string(), &tc.id, &tc.parent_id,
                      &tc.mutation_kind)) {
        continue;  // foreign file; not ours to report
      }
      tc.disposition = d;
      tc.path = entry.path();
      out.push_back(std::move(tc));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const StoredTestCase& a, const StoredTestCase& b) {
              return a.id < b.id;
            });
  return out;
}

void OutputLayout::set_meta(const std::string& key, const std::string& value) {
  meta_[key] = value;
}

std::optional<std::string> OutputLayout::meta(const std::string& key) const {
  const auto it = meta_.find(key);
  if (it == meta_.end()) return std::nullopt;
  return it->second;
}

void OutputLayout::write_meta() const {
  std::ostringstream out;
  out << "counter=" << counter_ << "\n";
  for (const auto& [key, value] : meta_) {
    out << key << "=" << value << "\n";
  }
  const std::string text = out.str();
  write_file_atomic(root_ / kMetaFile,
                    ByteSpan(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

void OutputLayout::load_meta() {
  meta_.clear();
  counter_ = 0;
  const fs::path p = root_ / kMetaFile;
  if (!fs::exists(p)) return;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "counter") {
      counter_ = std::strtoull(value.c_str(), nullptr, 10);
    } else {
      meta_[key] = value;
    }
  }
}

}  // namespace ff
