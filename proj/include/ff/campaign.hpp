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
// Campaign loop: mutate -> execute -> triage. An input is saved when it
// covers a uniform edge the campaign has not seen; crashes and hangs
// route to their own directories, new-edge inputs to the queue (fixed
// length) or vari_seed (variant length). Given one RNG seed and fork
// mode, the mutation stream and the saved-testcase set are reproducible.

#ifndef FF_CAMPAIGN_HPP_
#define FF_CAMPAIGN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ff/corpus_store.hpp"
#include "ff/executor.hpp"
#include "ff/target.hpp"

namespace ff {

enum class EngineKind { kRandom, kNeuzz };

const char* engine_name(EngineKind engine);

struct CampaignConfig {
  TargetProgram target;
  ExecMode mode = ExecMode::kFork;
  EngineKind engine = EngineKind::kRandom;
  std::vector<Bytes> seeds;
  double duration_sec = 0;
  std::uint64_t train_budget = 5000;  // deterministic-collection execs
  std::uint64_t rng_seed = 1;
  std::filesystem::path output_root;
  int hang_ms = 200;
  // Optional exec cap on top of the wall clock (0 = none). The mutation
  // stream is clock-independent, so capping execs makes two runs agree
  // on the exact saved set, not just on the stream prefix.
  std::uint64_t max_execs = 0;
  std::filesystem::path spawn_count_file;
  std::string config_fingerprint;  // recorded in layout.meta
};

struct TimelinePoint {
  std::int64_t unix_millis;
  std::uint64_t total_execs;
  std::uint64_t covered_edges;
};

struct CampaignStats {
  std::uint64_t total_execs = 0;
  std::uint64_t covered_edges = 0;
  ExecMode effective_mode = ExecMode::kFork;
  bool mode_downgraded = false;
  double elapsed_sec = 0;
  double execs_per_sec = 0;
  std::uint64_t saved_queue = 0;
  std::uint64_t saved_variant = 0;
  std::uint64_t saved_crash = 0;
  std::uint64_t saved_hang = 0;
  std::uint64_t rng_seed = 0;
  std::vector<TimelinePoint> timeline;
  std::vector<std::string> warnings;
  std::filesystem::path layout_root;
  std::filesystem::path stats_log;  // "unix_millis total_execs covered_edges"
};

// Runs one campaign to its wall-clock (or exec-cap) end. Creates the
// output layout under config.output_root and a stats.log next to it.
// Throws ConfigError for an empty seed corpus or negative duration.
CampaignStats fuzz_campaign(const CampaignConfig& config);

}  // namespace ff

#endif  // FF_CAMPAIGN_HPP_
