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

#include "ff/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "ff/error.hpp"
#include "ff/neuzz.hpp"
#include "ff/rng.hpp"

namespace ff {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t unix_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct QueueEntry {
  Bytes data;
  std::uint64_t id;
};

// Shared engine state: executes, triages, saves, keeps the clock.
struct Campaign {
  const CampaignConfig& config;
  ExecSession session;
  OutputLayout layout;
  CoverageMap accumulated{Scheme::kCollisionFree};
  std::vector<QueueEntry> queue;
  Rng rng;
  Clock::time_point deadline;
  CampaignStats stats;
  std::unordered_set<std::uint64_t> tried_hashes;

  Campaign(const CampaignConfig& cfg, SessionOptions session_opts,
           OutputLayout lay)
      : config(cfg),
        session(cfg.target, std::move(session_opts)),
        layout(std::move(lay)),
        rng(cfg.rng_seed),
        deadline(Clock::now() +
                 std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(cfg.duration_sec))) {}

  bool exhausted() const {
    if (config.max_execs != 0 && stats.total_execs >= config.max_execs) {
      return true;
    }
    return Clock::now() >= deadline;
  }

  void record_timeline() {
    stats.timeline.push_back(
        {unix_millis(), stats.total_execs, stats.covered_edges});
  }

  // Executes one candidate and routes it. Returns nullopt when the
  // budget or the clock ran out before the candidate was executed.
  std::optional<ExecResult> exec_and_triage(const Bytes& data,
                                            std::uint64_t parent_id,
                                            const std::string& kind,
                                            bool variant_length) {
    if (exhausted()) return std::nullopt;
    ExecResult result = session.execute(data);
    ++stats.total_execs;

    const bool gained = accumulated.gains_from(result.coverage);
    if (gained) {
      accumulated.merge_from(result.coverage);
      stats.covered_edges = accumulated.count_covered();

      // Triage order: crash beats hang beats new-edge. Saving is gated
      // on new coverage in every class, which both deduplicates and
      // keeps the saved set a function of the exec stream alone.
      TestCase tc{data, parent_id, kind, variant_length};
      if (result.status == ExecStatus::kCrash) {
        layout.save_testcase(tc, Disposition::kCrash);
        ++stats.saved_crash;
      } else if (result.status == ExecStatus::kHang) {
        layout.save_testcase(tc, Disposition::kHang);
        ++stats.saved_hang;
      } else if (variant_length) {
        layout.save_testcase(tc, Disposition::kNewEdgeVariant);
        ++stats.saved_variant;
        queue.push_back({data, layout.counter()});
      } else {
        layout.save_testcase(tc, Disposition::kNewEdgeFixed);
        ++stats.saved_queue;
        queue.push_back({data, layout.counter()});
      }
    }
    if (gained || stats.total_execs % 200 == 0) record_timeline();
    return result;
  }

  // Skips exact repeats of earlier candidates; gradient rounds revisit
  // parents and would otherwise re-execute identical variants.
  bool seen_before(const Bytes& data) {
    return !tried_hashes.insert(fnv1a64(data)).second;
  }
};

Bytes havoc_mutate(const Bytes& parent, Rng& rng) {
  Bytes data = parent;
  const unsigned rounds = 1u << (1 + rng.below(5));  // 2..32 stacked ops
  static constexpr std::uint8_t kInteresting[] = {0x80, 0xff, 0x00, 0x01, 0x10,
                                                  0x20, 0x40, 0x64, 0x7f};
  for (unsigned r = 0; r < rounds; ++r) {
    if (data.empty()) {
      data.push_back(rng.next_byte());
      continue;
    }
    switch (rng.below(10)) {
      case 0: {  // flip one bit
        const std::size_t bit = rng.below(data.size() * 8);
        data[bit >> 3] ^= static_cast<std::uint8_t>(0x80 >> (bit & 7));
        break;
      }
      case 1:  // random byte
        data[rng.below(data.size())] = rng.next_byte();
        break;
      case 2: {  // 8-bit arithmetic
        const std::size_t i = rng.below(data.size());
        const int delta = 1 + static_cast<int>(rng.below(35));
        data[i] = static_cast<std::uint8_t>(
            rng.below(2) ? data[i] + delta : data[i] - delta);
        break;
      }
      case 3:  // interesting value
        data[rng.below(data.size())] =
            kInteresting[rng.below(sizeof(kInteresting))];
        break;
      case 4: {  // overwrite a block with one byte
        const std::size_t i = rng.below(data.size());
        const std::size_t n = 1 + rng.below(std::min<std::size_t>(16, data.size() - i));
        const std::uint8_t v = rng.next_byte();
        std::fill(data.begin() + i, data.begin() + i + n, v);
        break;
      }
      case 5: {  // copy a block within the input
        const std::size_t from = rng.below(data.size());
        const std::size_t to = rng.below(data.size());
        const std::size_t n = 1 + rng.below(std::min<std::size_t>(
                                      16, data.size() - std::max(from, to)));
        std::memmove(data.data() + to, data.data() + from, n);
        break;
      }
      case 6: {  // insert a random block (length grows)
        if (data.size() >= 4096) break;
        const std::size_t n = 1 + rng.below(16);
        const std::size_t at = rng.below(data.size() + 1);
        Bytes block(n);
        for (auto& b : block) b = rng.next_byte();
        data.insert(data.begin() + at, block.begin(), block.end());
        break;
      }
      case 7: {  // delete a block (length shrinks)
        if (data.size() <= 1) break;
        const std::size_t n = 1 + rng.below(std::min<std::size_t>(16, data.size() - 1));
        const std::size_t at = rng.below(data.size() - n + 1);
        data.erase(data.begin() + at, data.begin() + at + n);
        break;
      }
      case 8: {  // swap two bytes
        const std::size_t a = rng.below(data.size());
        const std::size_t b = rng.below(data.size());
        std::swap(data[a], data[b]);
        break;
      }
      case 9:  // xor a byte
        data[rng.below(data.size())] ^= static_cast<std::uint8_t>(
            1 + rng.below(255));
        break;
    }
  }
  return data;
}

void run_random_engine(Campaign& c) {
  std::size_t cursor = 0;
  while (!c.exhausted() && !c.queue.empty()) {
    const QueueEntry parent = c.queue[cursor % c.queue.size()];
    ++cursor;
    for (int i = 0; i < 32; ++i) {
      Bytes variant = havoc_mutate(parent.data, c.rng);
      const bool variant_length = variant.size() != parent.data.size();
      if (!c.exec_and_triage(variant, parent.id, "havoc", variant_length)) {
        return;
      }
    }
  }
}

void run_neuzz_engine(Campaign& c) {
  const Bytes& seed = c.config.seeds.front();

  // Stage 1: deterministic collection from the single seed, feeding both
  // the training corpus and the campaign's own triage.
  TrainingCorpus corpus = collect_training_corpus(
      [&c](const Bytes& input) {
        return c.exec_and_triage(input, 0, "det", false);
      },
      seed, c.config.train_budget);

  // Stage 2: train once per campaign.
  const ValidationReport report = validate_corpus(corpus);
  if (!report.pass) {
    // Cannot happen for a collected corpus; bail out to havoc so the
    // campaign still spends its budget.
    c.stats.warnings.push_back("training corpus failed validation: " +
                               report.summary());
    run_random_engine(c);
    return;
  }
  std::vector<std::string> selection_warnings;
  const std::vector<std::uint32_t> edges =
      select_output_edges(corpus, 512, &selection_warnings);
  if (edges.empty()) {
    c.stats.warnings.push_back("no variable edges in training corpus");
    run_random_engine(c);
    return;
  }
  Hyper hyper;
  hyper.rng_seed = c.config.rng_seed ^ 0x5eedULL;
  const Model model = train(corpus, edges, hyper);

  // Stage 3: gradient-guided rounds, newest parents first, cycling the
  // model's edges and preferring ones the campaign has not covered.
  const std::size_t n = seed.size();
  std::size_t edge_cursor = 0;
  std::size_t round = 0;
  while (!c.exhausted() && !c.queue.empty()) {
    // Newest-first parent cycling; only seed-length parents fit the model.
    const std::size_t qsize = c.queue.size();
    const QueueEntry* parent = nullptr;
    for (std::size_t back = 0; back < qsize; ++back) {
      const QueueEntry& cand = c.queue[qsize - 1 - ((round + back) % qsize)];
      if (cand.data.size() == n) {
        parent = &cand;
        break;
      }
    }
    if (parent == nullptr) {
      run_random_engine(c);
      return;
    }
    const QueueEntry chosen = *parent;  // queue may grow during the round

    // Pick the next uncovered model edge, or plain round-robin once all
    // model edges are covered (their gradients still point somewhere
    // useful: toward the finer-grained neighbors of covered branches).
    std::size_t edge_index = edge_cursor % edges.size();
    for (std::size_t probe = 0; probe < edges.size(); ++probe) {
      const std::size_t idx = (edge_cursor + probe) % edges.size();
      if (c.accumulated.cell(edges[idx]) == 0) {
        edge_index = idx;
        break;
      }
    }
    ++edge_cursor;

    const std::vector<double> grad =
        gradient(model, chosen.data, edge_index, GradientKind::kRaw);
    const FixedLengthVariants fixed = mutate_fixed_length(chosen.data, grad, 12);
    for (const Bytes& variant : fixed.variants) {
      if (c.seen_before(variant)) continue;
      if (!c.exec_and_triage(variant, chosen.id, "grad", false)) return;
    }

    if (round % 4 == 3) {
      const VariantLengthVariants vl = mutate_variant_length(chosen.data, c.rng);
      for (const VariantLengthItem& item : vl.variants) {
        if (c.seen_before(item.data)) continue;
        if (!c.exec_and_triage(item.data, chosen.id,
                               item.is_insertion ? "insert" : "delete", true)) {
          return;
        }
      }
    }
    ++round;
  }
}

}  // namespace

const char* engine_name(EngineKind engine) {
  return engine == EngineKind::kRandom ? "random" : "neuzz";
}

CampaignStats fuzz_campaign(const CampaignConfig& config) {
  if (config.seeds.empty()) {
    throw ConfigError("campaign needs a nonempty seed corpus");
  }
  if (config.duration_sec < 0) {
    throw ConfigError("campaign duration must be >= 0");
  }
  if (config.output_root.empty()) {
    throw ConfigError("campaign needs an output root");
  }

  OutputLayout layout = OutputLayout::create(config.output_root);
  layout.set_meta("mode", exec_mode_name(config.mode));
  layout.set_meta("engine", engine_name(config.engine));
  layout.set_meta("target", config.target.name);
  layout.set_meta("rng_seed", std::to_string(config.rng_seed));
  layout.set_meta("duration_sec", std::to_string(config.duration_sec));
  layout.set_meta("config_hash", config.config_fingerprint.empty()
                                     ? "unspecified"
                                     : config.config_fingerprint);
  layout.write_meta();

  SessionOptions session_opts;
  session_opts.requested_mode = config.mode;
  session_opts.scheme = Scheme::kCollisionFree;
  session_opts.hang_ms = config.hang_ms;
  session_opts.spawn_count_file = config.spawn_count_file;
  session_opts.work_dir = config.output_root / ".work";

  Campaign c(config, std::move(session_opts), std::move(layout));
  c.stats.rng_seed = config.rng_seed;
  c.stats.effective_mode = c.session.effective_mode();
  c.stats.mode_downgraded = c.session.mode_downgraded();
  for (const std::string& w : c.session.warnings()) {
    c.stats.warnings.push_back(w);
  }
  c.stats.layout_root = c.layout.root();

  const auto start = Clock::now();
  c.record_timeline();

  for (const Bytes& seed : config.seeds) {
    if (!c.exec_and_triage(seed, 0, "seed", false)) break;
  }
  if (!c.exhausted()) {
    if (config.engine == EngineKind::kRandom) {
      run_random_engine(c);
    } else {
      run_neuzz_engine(c);
    }
  }

  c.stats.elapsed_sec = std::chrono::duration<double>(Clock::now() - start).count();
  c.stats.execs_per_sec = c.stats.elapsed_sec > 0
                              ? c.stats.total_execs / c.stats.elapsed_sec
                              : 0.0;
  c.record_timeline();

  // Line-delimited stats: unix_millis total_execs covered_edges.
  std::ostringstream log;
  for (const TimelinePoint& p : c.stats.timeline) {
    log << p.unix_millis << " " << p.total_execs << " " << p.covered_edges
        << "\n";
  }
  const std::string text = log.str();
  c.stats.stats_log = config.output_root / "stats.log";
  write_file_atomic(c.stats.stats_log,
                    ByteSpan(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));

  c.layout.set_meta("total_execs", std::to_string(c.stats.total_execs));
  c.layout.set_meta("covered_edges", std::to_string(c.stats.covered_edges));
  c.layout.write_meta();
  return c.stats;
}

}  // namespace ff
