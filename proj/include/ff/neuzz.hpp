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
// Gradient-guided mutation. The pipeline:
//
//   collect_training_corpus  deterministic perturbations of ONE seed,
//                            every sample the seed's length and within a
//                            few bytes of it
//   validate_corpus          enforces exactly that discipline before any
//                            training happens
//   select_output_edges      keeps the edges whose labels vary
//   train                    two-layer perceptron, full-batch descent
//   gradient                 analytic d(edge probability)/d(input byte)
//   mutate_fixed_length      steps top-gradient bytes, length preserved
//   mutate_variant_length    insert/delete variants, routed separately

#ifndef FF_NEUZZ_HPP_
#define FF_NEUZZ_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ff/bytes.hpp"
#include "ff/executor.hpp"
#include "ff/rng.hpp"

namespace ff {

struct TrainingSample {
  Bytes input;
  std::vector<std::uint32_t> covered;  // uniform edge ids, ascending
};

struct TrainingCorpus {
  Bytes seed;
  std::vector<TrainingSample> samples;
  std::uint64_t budget_used = 0;
  std::string schedule_position;  // stage reached when collection stopped
};

// Byte-level Hamming distance between equal-length buffers.
std::size_t hamming_bytes(ByteSpan a, ByteSpan b);

// Stops collection early when it returns nullopt (campaign deadline).
using ExecFn = std::function<std::optional<ExecResult>(const Bytes&)>;

// Applies the deterministic stages to the single seed in fixed order --
// walking bit flips (1/2/4 bits), walking byte flips (1/2/4 bytes),
// 8-bit arithmetic +-1..35, interesting-value substitution -- recording
// each variant's covered uniform edges, up to budget_execs variants.
// Every generated input has the seed's exact length. Throws ConfigError
// on an empty seed; requires the collision-free scheme.
TrainingCorpus collect_training_corpus(ExecSession& session, const Bytes& seed,
                                       std::uint64_t budget_execs);
TrainingCorpus collect_training_corpus(const ExecFn& exec, const Bytes& seed,
                                       std::uint64_t budget_execs,
                                       Scheme scheme = Scheme::kCollisionFree);

struct ValidationIssue {
  std::size_t sample_index;
  std::string reason;
};

struct ValidationReport {
  bool pass = false;
  std::size_t sample_count = 0;
  std::vector<ValidationIssue> violations;
  std::vector<std::string> warnings;  // e.g. sample count outside 1k..10k
  std::string summary() const;
};

// Never throws; reports. PASS iff every sample has the seed's length,
// every sample is within alignment_threshold differing bytes of the
// seed, and there are at least min_samples samples. Sample counts
// outside the 1,000..10,000 guideline band only warn.
ValidationReport validate_corpus(const TrainingCorpus& corpus,
                                 std::size_t alignment_threshold = 4,
                                 std::size_t min_samples = 2);

// The up-to-max_edges edges with the highest label variance across
// samples, variance ties broken by ascending edge id. Edges covered in
// all samples or none carry no signal and are excluded; if fewer
// variable edges exist than asked for, returns them all with a warning.
std::vector<std::uint32_t> select_output_edges(
    const TrainingCorpus& corpus, std::size_t max_edges,
    std::vector<std::string>* warnings = nullptr);

struct Hyper {
  std::size_t hidden = 64;
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  std::uint64_t rng_seed = 1;
};

inline constexpr char kModelMagic[6] = {'F', 'F', 'M', 'L', 'P', '1'};

// inputs/255 -> ReLU hidden layer -> sigmoid per selected edge.
struct Model {
  std::size_t n_in = 0;
  std::size_t hidden = 0;
  std::size_t n_out = 0;
  std::vector<std::uint32_t> output_edges;  // edge id per output unit
  std::vector<double> w1;  // n_in x hidden, row-major by input index
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden x n_out, row-major by hidden index
  std::vector<double> b2;  // n_out
  double final_loss = 0;
  std::vector<double> loss_history;  // loss at the start of each epoch

  // Forward pass on an already scaled input vector.
  std::vector<double> forward(const std::vector<double>& x) const;

  // Forward pass on raw bytes; all outputs in (0, 1). Throws UsageError
  // on a length mismatch.
  std::vector<double> predict(ByteSpan input) const;

  // On disk: magic, dims, output edge ids, then the weight matrices
  // row-major as little-endian 64-bit floats.
  Bytes serialize() const;
  static Model deserialize(ByteSpan data);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);
};

// Full-batch gradient descent with binary cross-entropy, fixed epoch
// count, RNG-seeded initialization; bit-reproducible for a given seed.
// Revalidates the corpus first and throws DataQualityError on failure;
// training on a dirty corpus is a hard error, not a warning.
Model train(const TrainingCorpus& corpus,
            const std::vector<std::uint32_t>& output_edges, const Hyper& hyper);

enum class GradientKind {
  kRaw,     // analytic values
  kSigned,  // componentwise sign in {-1, 0, +1}
};

// d(output[edge_index]) / d(input component) through the scaled input,
// length n_in. Throws BoundsError for edge_index >= n_out.
std::vector<double> gradient(const Model& model, ByteSpan input,
                             std::size_t edge_index, GradientKind kind);

// Gradient components below this magnitude count as zero: their sign is
// 0 and top-k ranking never picks them.
inline constexpr double kGradientZero = 1e-12;

struct FixedLengthVariants {
  std::vector<Bytes> variants;
  bool k_clamped = false;  // k exceeded the input length
};

// Ranks bytes by |gradient| (ties by ascending index), takes the top k
// positions, and for each prefix of that list emits one variant per
// step size {1, 16, 64, 255}, stepping each selected byte in its
// gradient-sign direction with clamping to [0, 255]. Every variant has
// the input's exact length.
FixedLengthVariants mutate_fixed_length(ByteSpan input,
                                        const std::vector<double>& grad,
                                        std::size_t k);

struct VariantLengthItem {
  Bytes data;
  bool is_insertion = false;
};

struct VariantLengthVariants {
  std::vector<VariantLengthItem> variants;
  bool insertion_only = false;  // deletion impossible on a 1-byte input
};

// Emits per_kind insertion variants (random 1..16-byte block at a random
// offset) and per_kind deletion variants (random block removed, never
// emptying the input). Every variant's length differs from the input's.
VariantLengthVariants mutate_variant_length(ByteSpan input, Rng& rng,
                                            std::size_t per_kind = 4);

// Materializes a corpus: seed file, samples directory with one .bin and
// one .edges file per sample, and a manifest listing (sample file,
// edge-bitset file, hamming distance) per line.
void write_corpus(const TrainingCorpus& corpus,
                  const std::filesystem::path& dir);

}  // namespace ff

#endif  // FF_NEUZZ_HPP_
