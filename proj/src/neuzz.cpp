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

#include "ff/neuzz.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ff/error.hpp"

namespace ff {
namespace fs = std::filesystem;

namespace {

// AFL's 8-bit interesting values, as unsigned bytes.
constexpr std::uint8_t kInteresting8[] = {0x80, 0xff, 0x00, 0x01, 0x10,
                                          0x20, 0x40, 0x64, 0x7f};
constexpr int kArithMax = 35;

void flip_bit(Bytes& data, std::size_t bit) {
  data[bit >> 3] ^= static_cast<std::uint8_t>(0x80 >> (bit & 7));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

std::uint32_t get_u32(ByteSpan data, std::size_t& pos) {
  if (pos + 4 > data.size()) throw IoError("model file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{data[pos + i]} << (8 * i);
  pos += 4;
  return v;
}

void put_f64(Bytes& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  for (int i = 0; i < 8; ++i) out.push_back((bits >> (8 * i)) & 0xff);
}

double get_f64(ByteSpan data, std::size_t& pos) {
  if (pos + 8 > data.size()) throw IoError("model file truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{data[pos + i]} << (8 * i);
  pos += 8;
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

std::size_t hamming_bytes(ByteSpan a, ByteSpan b) {
  const std::size_t common = std::min(a.size(), b.size());
  std::size_t distance = std::max(a.size(), b.size()) - common;
  for (std::size_t i = 0; i < common; ++i) distance += a[i] != b[i];
  return distance;
}

TrainingCorpus collect_training_corpus(ExecSession& session, const Bytes& seed,
                                       std::uint64_t budget_execs) {
  if (session.scheme() != Scheme::kCollisionFree) {
    throw UsageError("training collection needs a collision-free session");
  }
  return collect_training_corpus(
      [&session](const Bytes& input) -> std::optional<ExecResult> {
        return session.execute(input);
      },
      seed, budget_execs, session.scheme());
}

TrainingCorpus collect_training_corpus(const ExecFn& exec, const Bytes& seed,
                                       std::uint64_t budget_execs,
                                       Scheme scheme) {
  if (seed.empty()) throw ConfigError("training seed must not be empty");
  if (budget_execs == 0) throw ConfigError("collection budget must be >= 1");
  if (scheme != Scheme::kCollisionFree) {
    throw UsageError("training collection needs the collision-free metric");
  }

  TrainingCorpus corpus;
  corpus.seed = seed;
  const std::size_t len = seed.size();
  const std::size_t bits = len * 8;
  bool stopped = false;

  auto submit = [&](Bytes variant, const char* stage) {
    if (stopped) return;
    if (variant == seed) return;  // no-op perturbation, no information
    if (corpus.budget_used >= budget_execs) {
      stopped = true;
      return;
    }
    corpus.schedule_position = stage;
    const std::optional<ExecResult> result = exec(variant);
    if (!result.has_value()) {
      stopped = true;
      return;
    }
    ++corpus.budget_used;
    corpus.samples.push_back(
        TrainingSample{std::move(variant), result->coverage.covered_ids()});
  };

  // Walking bit flips: 1, 2, 4 consecutive bits.
  for (std::size_t width : {1u, 2u, 4u}) {
    const char* stage = width == 1   ? "bitflip 1/1"
                        : width == 2 ? "bitflip 2/1"
                                     : "bitflip 4/1";
    for (std::size_t bit = 0; bit + width <= bits && !stopped; ++bit) {
      Bytes v = seed;
      for (std::size_t w = 0; w < width; ++w) flip_bit(v, bit + w);
      submit(std::move(v), stage);
    }
  }

  // Walking byte flips: 1, 2, 4 consecutive bytes.
  for (std::size_t width : {1u, 2u, 4u}) {
    const char* stage = width == 1   ? "byteflip 8/8"
                        : width == 2 ? "byteflip 16/8"
                                     : "byteflip 32/8";
    for (std::size_t i = 0; i + width <= len && !stopped; ++i) {
      Bytes v = seed;
      for (std::size_t w = 0; w < width; ++w) v[i + w] ^= 0xff;
      submit(std::move(v), stage);
    }
  }

  // 8-bit arithmetic, +-1..35 per byte.
  for (std::size_t i = 0; i < len && !stopped; ++i) {
    for (int delta = 1; delta <= kArithMax && !stopped; ++delta) {
      Bytes up = seed;
      up[i] = static_cast<std::uint8_t>(up[i] + delta);
      submit(std::move(up), "arith 8/8");
      Bytes down = seed;
      down[i] = static_cast<std::uint8_t>(down[i] - delta);
      submit(std::move(down), "arith 8/8");
    }
  }

  // Interesting-value substitution per byte.
  for (std::size_t i = 0; i < len && !stopped; ++i) {
    for (std::uint8_t value : kInteresting8) {
      Bytes v = seed;
      v[i] = value;
      submit(std::move(v), "interest 8/8");
      if (stopped) break;
    }
  }

  if (!stopped) corpus.schedule_position = "complete";
  return corpus;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  if (pass) {
    out << "PASS (" << sample_count << " samples";
    if (!warnings.empty()) out << ", " << warnings.size() << " warning(s)";
    out << ")";
  } else {
    out << "FAIL: " << violations.size() << " violation(s) across "
        << sample_count << " samples";
    if (!violations.empty()) {
      out << "; first: sample " << violations.front().sample_index << ": "
          << violations.front().reason;
    }
  }
  return out.str();
}

ValidationReport validate_corpus(const TrainingCorpus& corpus,
                                 std::size_t alignment_threshold,
                                 std::size_t min_samples) {
  ValidationReport report;
  report.sample_count = corpus.samples.size();

  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const TrainingSample& sample = corpus.samples[i];
    if (sample.input.size() != corpus.seed.size()) {
      report.violations.push_back(
          {i, "length " + std::to_string(sample.input.size()) +
                  " != seed length " + std::to_string(corpus.seed.size())});
      continue;  // hamming against a different length is moot
    }
    const std::size_t distance = hamming_bytes(sample.input, corpus.seed);
    if (distance > alignment_threshold) {
      report.violations.push_back(
          {i, "differs from seed in " + std::to_string(distance) +
                  " bytes (threshold " + std::to_string(alignment_threshold) +
                  ")"});
    }
  }
  if (report.sample_count < min_samples) {
    report.violations.push_back(
        {0, "only " + std::to_string(report.sample_count) +
                " samples (minimum " + std::to_string(min_samples) + ")"});
  }
  if (report.sample_count < 1000 || report.sample_count > 10000) {
    report.warnings.push_back(
        "sample count " + std::to_string(report.sample_count) +
        " outside the 1000..10000 guideline band");
  }
  report.pass = report.violations.empty();
  return report;
}

std::vector<std::uint32_t> select_output_edges(
    const TrainingCorpus& corpus, std::size_t max_edges,
    std::vector<std::string>* warnings) {
  if (corpus.samples.empty()) throw UsageError("empty corpus");
  const std::uint64_t n = corpus.samples.size();

  std::vector<std::uint32_t> count(kMapSize, 0);
  for (const TrainingSample& sample : corpus.samples) {
    for (std::uint32_t id : sample.covered) ++count[id];
  }

  struct Ranked {
    std::uint64_t spread;  // c * (n - c): proportional to label variance
    std::uint32_t id;
  };
  std::vector<Ranked> ranked;
  for (std::uint32_t id = 0; id < kMapSize; ++id) {
    const std::uint64_t c = count[id];
    if (c == 0 || c == n) continue;  // always-off / always-on: no signal
    ranked.push_back({c * (n - c), id});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.spread != b.spread) return a.spread > b.spread;
    return a.id < b.id;
  });

  if (ranked.size() < max_edges && warnings != nullptr) {
    warnings->push_back("only " + std::to_string(ranked.size()) +
                        " variable edges available (requested " +
                        std::to_string(max_edges) + ")");
  }
  std::vector<std::uint32_t> out;
  const std::size_t take = std::min<std::size_t>(max_edges, ranked.size());
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].id);
  return out;
}

std::vector<double> Model::forward(const std::vector<double>& x) const {
  std::vector<double> h(hidden, 0.0);
  for (std::size_t j = 0; j < hidden; ++j) h[j] = b1[j];
  for (std::size_t i = 0; i < n_in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = &w1[i * hidden];
    for (std::size_t j = 0; j < hidden; ++j) h[j] += xi * row[j];
  }
  for (double& v : h) v = v > 0 ? v : 0.0;

  std::vector<double> out(n_out, 0.0);
  for (std::size_t e = 0; e < n_out; ++e) out[e] = b2[e];
  for (std::size_t j = 0; j < hidden; ++j) {
    const double hj = h[j];
    if (hj == 0.0) continue;
    const double* row = &w2[j * n_out];
    for (std::size_t e = 0; e < n_out; ++e) out[e] += hj * row[e];
  }
  for (double& v : out) v = sigmoid(v);
  return out;
}

std::vector<double> Model::predict(ByteSpan input) const {
  if (input.size() != n_in) {
    throw UsageError("predict: input length " + std::to_string(input.size()) +
                     " != model width " + std::to_string(n_in));
  }
  std::vector<double> x(n_in);
  for (std::size_t i = 0; i < n_in; ++i) x[i] = input[i] / 255.0;
  return forward(x);
}

Model train(const TrainingCorpus& corpus,
            const std::vector<std::uint32_t>& output_edges,
            const Hyper& hyper) {
  const ValidationReport report = validate_corpus(corpus);
  if (!report.pass) {
    throw DataQualityError("refusing to train: " + report.summary());
  }
  if (output_edges.empty()) throw UsageError("no output edges selected");
  if (corpus.seed.empty()) throw ConfigError("empty training seed");

  const std::size_t s_count = corpus.samples.size();
  const std::size_t n = corpus.seed.size();
  const std::size_t h_count = hyper.hidden;
  const std::size_t e_count = output_edges.size();

  Model model;
  model.n_in = n;
  model.hidden = h_count;
  model.n_out = e_count;
  model.output_edges = output_edges;
  model.w1.resize(n * h_count);
  model.b1.assign(h_count, 0.0);
  model.w2.resize(h_count * e_count);
  model.b2.assign(e_count, 0.0);

  Rng rng(hyper.rng_seed);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& w : model.w1) w = rng.uniform(-r1, r1);
  const double r2 = 1.0 / std::sqrt(static_cast<double>(h_count));
  for (double& w : model.w2) w = rng.uniform(-r2, r2);

  // Scaled inputs and binary labels, fixed layout for reproducibility.
  std::vector<double> x(s_count * n);
  std::vector<std::uint8_t> y(s_count * e_count);
  for (std::size_t s = 0; s < s_count; ++s) {
    const TrainingSample& sample = corpus.samples[s];
    for (std::size_t i = 0; i < n; ++i) x[s * n + i] = sample.input[i] / 255.0;
    for (std::size_t e = 0; e < e_count; ++e) {
      y[s * e_count + e] = std::binary_search(
          sample.covered.begin(), sample.covered.end(), output_edges[e]);
    }
  }

  const double inv = 1.0 / (static_cast<double>(s_count) * e_count);
  std::vector<double> h_pre(h_count), h_act(h_count), p(e_count), dz(e_count),
      dh(h_count);
  std::vector<double> gw1(n * h_count), gb1(h_count), gw2(h_count * e_count),
      gb2(e_count);

  auto epoch_pass = [&](bool update) -> double {
    double loss = 0.0;
    if (update) {
      std::fill(gw1.begin(), gw1.end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      std::fill(gw2.begin(), gw2.end(), 0.0);
      std::fill(gb2.begin(), gb2.end(), 0.0);
    }
    for (std::size_t s = 0; s < s_count; ++s) {
      const double* xs = &x[s * n];
      const std::uint8_t* ys = &y[s * e_count];
      // forward
      for (std::size_t j = 0; j < h_count; ++j) h_pre[j] = model.b1[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = xs[i];
        if (xi == 0.0) continue;
        const double* row = &model.w1[i * h_count];
        for (std::size_t j = 0; j < h_count; ++j) h_pre[j] += xi * row[j];
      }
      for (std::size_t j = 0; j < h_count; ++j) {
        h_act[j] = h_pre[j] > 0 ? h_pre[j] : 0.0;
      }
      for (std::size_t e = 0; e < e_count; ++e) p[e] = model.b2[e];
      for (std::size_t j = 0; j < h_count; ++j) {
        const double hj = h_act[j];
        if (hj == 0.0) continue;
        const double* row = &model.w2[j * e_count];
        for (std::size_t e = 0; e < e_count; ++e) p[e] += hj * row[e];
      }
      for (std::size_t e = 0; e < e_count; ++e) {
        const double pe = sigmoid(p[e]);
        p[e] = pe;
        const double clamped = std::min(1.0 - 1e-12, std::max(1e-12, pe));
        loss -= ys[e] != 0 ? std::log(clamped) : std::log1p(-clamped);
      }
      if (!update) continue;
      // backward
      for (std::size_t e = 0; e < e_count; ++e) {
        dz[e] = (p[e] - ys[e]) * inv;
        gb2[e] += dz[e];
      }
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t j = 0; j < h_count; ++j) {
        if (h_pre[j] <= 0) continue;  // dead unit: no gw2 term, relu' = 0
        const double hj = h_act[j];
        double acc = 0.0;
        double* grow = &gw2[j * e_count];
        const double* wrow = &model.w2[j * e_count];
        for (std::size_t e = 0; e < e_count; ++e) {
          grow[e] += hj * dz[e];
          acc += wrow[e] * dz[e];
        }
        dh[j] = acc;
      }
      for (std::size_t j = 0; j < h_count; ++j) gb1[j] += dh[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = xs[i];
        if (xi == 0.0) continue;
        double* grow = &gw1[i * h_count];
        for (std::size_t j = 0; j < h_count; ++j) grow[j] += xi * dh[j];
      }
    }
    if (update) {
      const double lr = hyper.learning_rate;
      for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1[i] -= lr * gw1[i];
      for (std::size_t j = 0; j < h_count; ++j) model.b1[j] -= lr * gb1[j];
      for (std::size_t i = 0; i < model.w2.size(); ++i) model.w2[i] -= lr * gw2[i];
      for (std::size_t e = 0; e < e_count; ++e) model.b2[e] -= lr * gb2[e];
    }
    return loss * inv;
  };

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    model.loss_history.push_back(epoch_pass(/*update=*/true));
  }
  model.final_loss = epoch_pass(/*update=*/false);
  return model;
}

std::vector<double> gradient(const Model& model, ByteSpan input,
                             std::size_t edge_index, GradientKind kind) {
  if (edge_index >= model.n_out) {
    throw BoundsError("edge index " + std::to_string(edge_index) +
                      " out of range (model has " +
                      std::to_string(model.n_out) + " outputs)");
  }
  if (input.size() != model.n_in) {
    throw UsageError("gradient: input length " + std::to_string(input.size()) +
                     " != model width " + std::to_string(model.n_in));
  }

  const std::size_t n = model.n_in;
  const std::size_t h_count = model.hidden;
  std::vector<double> h_pre(h_count);
  for (std::size_t j = 0; j < h_count; ++j) h_pre[j] = model.b1[j];
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = input[i] / 255.0;
    if (xi == 0.0) continue;
    const double* row = &model.w1[i * h_count];
    for (std::size_t j = 0; j < h_count; ++j) h_pre[j] += xi * row[j];
  }
  double z = model.b2[edge_index];
  for (std::size_t j = 0; j < h_count; ++j) {
    if (h_pre[j] > 0) z += h_pre[j] * model.w2[j * model.n_out + edge_index];
  }
  const double p = sigmoid(z);
  const double dz = p * (1.0 - p);

  std::vector<double> dh(h_count, 0.0);
  for (std::size_t j = 0; j < h_count; ++j) {
    if (h_pre[j] > 0) dh[j] = model.w2[j * model.n_out + edge_index] * dz;
  }
  std::vector<double> dx(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &model.w1[i * h_count];
    double acc = 0.0;
    for (std::size_t j = 0; j < h_count; ++j) acc += row[j] * dh[j];
    dx[i] = acc;
  }

  if (kind == GradientKind::kSigned) {
    for (double& g : dx) {
      g = std::fabs(g) < kGradientZero ? 0.0 : (g > 0 ? 1.0 : -1.0);
    }
  }
  return dx;
}

FixedLengthVariants mutate_fixed_length(ByteSpan input,
                                        const std::vector<double>& grad,
                                        std::size_t k) {
  if (grad.size() != input.size()) {
    throw UsageError("gradient length != input length");
  }
  FixedLengthVariants out;
  if (k > input.size()) {
    out.k_clamped = true;
    k = input.size();
  }
  if (k == 0 || input.empty()) return out;

  std::vector<std::size_t> order;
  order.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (std::fabs(grad[i]) >= kGradientZero) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ga = std::fabs(grad[a]);
    const double gb = std::fabs(grad[b]);
    if (ga != gb) return ga > gb;
    return a < b;
  });
  if (order.size() > k) order.resize(k);

  static constexpr int kSteps[] = {1, 16, 64, 255};
  for (std::size_t prefix = 1; prefix <= order.size(); ++prefix) {
    for (int step : kSteps) {
      Bytes variant(input.begin(), input.end());
      for (std::size_t j = 0; j < prefix; ++j) {
        const std::size_t pos = order[j];
        const int dir = grad[pos] > 0 ? 1 : -1;
        const int value =
            std::clamp(static_cast<int>(variant[pos]) + dir * step, 0, 255);
        variant[pos] = static_cast<std::uint8_t>(value);
      }
      out.variants.push_back(std::move(variant));
    }
  }
  return out;
}

VariantLengthVariants mutate_variant_length(ByteSpan input, Rng& rng,
                                            std::size_t per_kind) {
  VariantLengthVariants out;
  const std::size_t len = input.size();

  for (std::size_t i = 0; i < per_kind; ++i) {
    const std::size_t block = 1 + rng.below(16);
    const std::size_t offset = rng.below(len + 1);
    Bytes v;
    v.reserve(len + block);
    v.insert(v.end(), input.begin(), input.begin() + offset);
    for (std::size_t b = 0; b < block; ++b) v.push_back(rng.next_byte());
    v.insert(v.end(), input.begin() + offset, input.end());
    out.variants.push_back({std::move(v), /*is_insertion=*/true});
  }

  if (len <= 1) {
    // Deleting from a 1-byte (or empty) input would empty it entirely.
    out.insertion_only = true;
    return out;
  }
  for (std::size_t i = 0; i < per_kind; ++i) {
    const std::size_t max_block = std::min<std::size_t>(16, len - 1);
    const std::size_t block = 1 + rng.below(max_block);
    const std::size_t offset = rng.below(len - block + 1);
    Bytes v(input.begin(), input.end());
    v.erase(v.begin() + offset, v.begin() + offset + block);
    out.variants.push_back({std::move(v), /*is_insertion=*/false});
  }
  return out;
}

Bytes Model::serialize() const {
  Bytes out;
  out.insert(out.end(), kModelMagic, kModelMagic + sizeof(kModelMagic));
  put_u32(out, static_cast<std::uint32_t>(n_in));
  put_u32(out, static_cast<std::uint32_t>(hidden));
  put_u32(out, static_cast<std::uint32_t>(n_out));
  for (std::uint32_t id : output_edges) put_u32(out, id);
  for (double d : w1) put_f64(out, d);
  for (double d : b1) put_f64(out, d);
  for (double d : w2) put_f64(out, d);
  for (double d : b2) put_f64(out, d);
  return out;
}

Model Model::deserialize(ByteSpan data) {
  if (data.size() < sizeof(kModelMagic) ||
      std::memcmp(data.data(), kModelMagic, sizeof(kModelMagic)) != 0) {
    throw IoError("not a model file: bad magic");
  }
  std::size_t pos = sizeof(kModelMagic);
  Model m;
  m.n_in = get_u32(data, pos);
  m.hidden = get_u32(data, pos);
  m.n_out = get_u32(data, pos);
  m.output_edges.resize(m.n_out);
  for (auto& id : m.output_edges) id = get_u32(data, pos);
  m.w1.resize(m.n_in * m.hidden);
  m.b1.resize(m.hidden);
  m.w2.resize(m.hidden * m.n_out);
  m.b2.resize(m.n_out);
  for (auto& d : m.w1) d = get_f64(data, pos);
  for (auto& d : m.b1) d = get_f64(data, pos);
  for (auto& d : m.w2) d = get_f64(data, pos);
  for (auto& d : m.b2) d = get_f64(data, pos);
  if (pos != data.size()) throw IoError("model file has trailing bytes");
  return m;
}

void Model::save(const fs::path& path) const {
  const Bytes data = serialize();
  write_file_atomic(path, data);
}

Model Model::load(const fs::path& path) { return deserialize(read_file(path)); }

void write_corpus(const TrainingCorpus& corpus, const fs::path& dir) {
  fs::create_directories(dir / "samples");
  write_file(dir / "seed.bin", corpus.seed);

  std::ostringstream manifest;
  char name[32];
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const TrainingSample& sample = corpus.samples[i];
    std::snprintf(name, sizeof(name), "%06zu", i + 1);
    const std::string bin = std::string("samples/") + name + ".bin";
    const std::string edges = std::string("samples/") + name + ".edges";
    write_file(dir / bin, sample.input);
    std::ostringstream edge_text;
    for (std::uint32_t id : sample.covered) edge_text << id << "\n";
    const std::string et = edge_text.str();
    write_file(dir / edges, ByteSpan(reinterpret_cast<const std::uint8_t*>(
                                         et.data()),
                                     et.size()));
    manifest << bin << "\t" << edges << "\t"
             << hamming_bytes(sample.input, corpus.seed) << "\n";
  }
  const std::string mt = manifest.str();
  write_file(dir / "corpus.manifest",
             ByteSpan(reinterpret_cast<const std::uint8_t*>(mt.data()),
                      mt.size()));
}

}  // namespace ff
