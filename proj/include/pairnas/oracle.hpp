// Copyright 2026 The pairnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ground-truth evaluators. Three oracles are provided: a synthetic quality
// function with known structure, an analytic Transformer cost model
// (parameters, FLOPs, latency) and a table-backed oracle that replays
// stored evaluation records.

#ifndef PAIRNAS_ORACLE_HPP_
#define PAIRNAS_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/random.hpp"
#include "pairnas/space.hpp"

namespace pairnas {

struct EvalRecord {
  Architecture arch;
  std::string hash;
  double quality_loss = 0.0;
  double latency_ms = 0.0;
  std::int64_t params = 0;
  double flops = 0.0;
  std::string oracle_id;
  std::uint64_t seed = 0;
};

enum class Metric { QualityLoss, Latency, Params, Flops };

inline double metric_value(const EvalRecord& r, Metric m) {
  switch (m) {
    case Metric::QualityLoss: return r.quality_loss;
    case Metric::Latency: return r.latency_ms;
    case Metric::Params: return static_cast<double>(r.params);
    case Metric::Flops: return r.flops;
  }
  return r.quality_loss;
}

inline Metric metric_from_string(std::string_view s) {
  if (s == "quality" || s == "quality_loss") return Metric::QualityLoss;
  if (s == "latency" || s == "latency_ms") return Metric::Latency;
  if (s == "params") return Metric::Params;
  if (s == "flops") return Metric::Flops;
  throw Error(Errc::MissingMetric, std::string(s));
}

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::QualityLoss: return "quality_loss";
    case Metric::Latency: return "latency_ms";
    case Metric::Params: return "params";
    case Metric::Flops: return "flops";
  }
  return "quality_loss";
}

// ---------------------------------------------------------------------------
// Synthetic quality

struct Interaction {
  std::string a;
  std::string b;
  double weight = 0.0;
};

struct SyntheticOracleConfig {
  std::uint64_t seed = 0;
  std::map<std::string, double> relevant_weights;
  std::set<std::string> null_features;
  std::vector<Interaction> interaction_pairs;
  double noise_sigma = 0.0;
};

/// Domain index of `feature`, averaged over active layers for per-layer
/// features (0 when the stack has no active layer).
inline double mean_index(const Architecture& arch, std::size_t feature) {
  const auto& c = arch.choice[feature];
  if (c.empty()) return 0.0;
  double sum = 0.0;
  for (const std::size_t i : c) sum += static_cast<double>(i);
  return sum / static_cast<double>(c.size());
}

inline double synthetic_quality(const SearchSpace& space, const SyntheticOracleConfig& cfg,
                                const Architecture& arch) {
  double loss = 0.0;
  for (const auto& [name, w] : cfg.relevant_weights) {
    auto f = space.find(name);
    if (!f) throw Error(Errc::UnknownWeightedFeature, name);
    loss += w * mean_index(arch, *f);
  }
  for (const Interaction& p : cfg.interaction_pairs) {
    auto a = space.find(p.a);
    auto b = space.find(p.b);
    if (!a) throw Error(Errc::UnknownWeightedFeature, p.a);
    if (!b) throw Error(Errc::UnknownWeightedFeature, p.b);
    loss += p.weight * mean_index(arch, *a) * mean_index(arch, *b);
  }
  if (cfg.noise_sigma > 0.0) {
    Rng rng(splitmix64(cfg.seed ^ arch_hash_u64(space, arch)));
    loss += std::normal_distribution<double>(0.0, cfg.noise_sigma)(rng);
  }
  return loss;
}

/// Noise-free part of the synthetic loss.
inline double synthetic_quality_true(const SearchSpace& space, SyntheticOracleConfig cfg,
                                     const Architecture& arch) {
  cfg.noise_sigma = 0.0;
  return synthetic_quality(space, cfg, arch);
}

inline void validate_synthetic_config(const SearchSpace& space, const SyntheticOracleConfig& cfg) {
  for (const auto& [name, w] : cfg.relevant_weights) {
    if (!space.find(name)) throw Error(Errc::UnknownWeightedFeature, name);
    if (cfg.null_features.contains(name))
      throw Error(Errc::InvalidArgument, name + " is both weighted and null");
  }
  for (const auto& name : cfg.null_features)
    if (!space.find(name)) throw Error(Errc::UnknownWeightedFeature, name);
  if (!(cfg.noise_sigma >= 0.0)) throw Error(Errc::InvalidArgument, "noise_sigma < 0");
}

/// Three relevant and three null features on the synthetic-small preset.
/// Larger embeddings, wider FFNs and deeper decoders lower the loss, with a
/// mild positive emb x FFN interaction.
inline SyntheticOracleConfig synthetic_small_config(std::uint64_t seed, double noise_sigma) {
  SyntheticOracleConfig cfg;
  cfg.seed = seed;
  cfg.relevant_weights = {{"Dec Emb Dim", -1.0}, {"Dec FFN Dim", -0.7}, {"Dec Layer Num", -0.9}};
  cfg.null_features = {"Dec Head Num", "Dec RPR Len", "Dec Norm Type"};
  cfg.interaction_pairs = {{"Dec Emb Dim", "Dec FFN Dim", 0.15}};
  cfg.noise_sigma = noise_sigma;
  return cfg;
}

/// Weights for an arbitrary space: each multi-valued feature draws a weight
/// from N(0, 1); those with |w| < 0.5 become null.
inline SyntheticOracleConfig default_synthetic_config(const SearchSpace& space,
                                                      std::uint64_t seed, double noise_sigma) {
  bool is_small = space.features.size() == preset_synthetic_small().features.size();
  if (is_small) {
    const auto ref = preset_synthetic_small();
    for (std::size_t i = 0; i < ref.features.size(); ++i)
      is_small = is_small && ref.features[i].name == space.features[i].name;
  }
  if (is_small) return synthetic_small_config(seed, noise_sigma);
  SyntheticOracleConfig cfg;
  cfg.seed = seed;
  cfg.noise_sigma = noise_sigma;
  Rng rng = make_rng(seed, "synthetic-weights");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const FeatureDef& f : space.features) {
    const double w = normal(rng);
    if (f.domain.size() < 2) continue;
    if (std::abs(w) < 0.5) cfg.null_features.insert(f.name);
    else cfg.relevant_weights[f.name] = w;
  }
  return cfg;
}

inline nlohmann::json to_json(const SyntheticOracleConfig& cfg) {
  nlohmann::json inter = nlohmann::json::array();
  for (const auto& p : cfg.interaction_pairs) inter.push_back({p.a, p.b, p.weight});
  return {{"seed", cfg.seed},
          {"relevant_weights", cfg.relevant_weights},
          {"null_features", cfg.null_features},
          {"interaction_pairs", inter},
          {"noise_sigma", cfg.noise_sigma}};
}

inline SyntheticOracleConfig synthetic_config_from_json(const nlohmann::json& j) {
  try {
    SyntheticOracleConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.relevant_weights = j.value("relevant_weights", std::map<std::string, double>{});
    cfg.null_features = j.value("null_features", std::set<std::string>{});
    for (const auto& p : j.value("interaction_pairs", nlohmann::json::array()))
      cfg.interaction_pairs.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>(),
                                       p.at(2).get<double>()});
    cfg.noise_sigma = j.value("noise_sigma", 0.0);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

// ---------------------------------------------------------------------------
// Analytic cost model

struct StackShape {
  std::size_t layers = 0;
  std::int64_t embed_dim = 0;            // embedding table width
  std::vector<std::int64_t> hidden;      // per active layer
  std::vector<std::int64_t> ffn;         // per active layer
  std::vector<std::int64_t> attended;    // encoder layers attended, decoder only
  bool pre_ln = false;
  bool present = false;
};

struct TransformerShape {
  StackShape encoder;
  StackShape decoder;
};

namespace detail {

inline std::vector<std::int64_t> per_layer_ints(const SearchSpace& space, const Architecture& arch,
                                                std::optional<std::size_t> f, std::size_t layers,
                                                std::int64_t fallback) {
  std::vector<std::int64_t> out(layers, fallback);
  if (!f) return out;
  const FeatureDef& def = space.features[*f];
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t idx = def.per_layer() ? arch.choice[*f].at(l) : arch.choice[*f].at(0);
    out[l] = std::get<std::int64_t>(def.domain[idx]);
  }
  return out;
}

inline StackShape stack_shape(const SearchSpace& space, const Architecture& arch,
                              const std::string& prefix, Scope scope) {
  StackShape s;
  s.layers = active_depth(space, arch, scope);
  const auto emb = space.find(prefix + "Emb Dim");
  const auto ffn = space.find(prefix + "FFN Dim");
  s.present = emb.has_value() || s.layers > 0;
  if (s.layers > 0 && (!emb || !ffn))
    throw Error(Errc::MissingDimensionFeature, prefix + "Emb Dim / " + prefix + "FFN Dim");
  if (emb) {
    s.embed_dim = std::get<std::int64_t>(space.features[*emb].domain[arch.choice[*emb].at(0)]);
    s.hidden = per_layer_ints(space, arch, emb, s.layers, 0);
  }
  s.ffn = per_layer_ints(space, arch, ffn, s.layers, 0);
  if (scope == Scope::PerDecoderLayer)
    s.attended = per_layer_ints(space, arch, space.find("Enc-Dec Attn"), s.layers, 1);
  if (auto norm = space.find(prefix + "Norm Type"))
    s.pre_ln = to_string(value_of(space, arch, *norm)) == "Pre-LN";
  return s;
}

}  // namespace detail

/// Reads Transformer dimensions from features named "Enc ..."/"Dec ..."
/// ("Emb Dim", "FFN Dim", "Norm Type") plus "Enc-Dec Attn".
inline TransformerShape transformer_shape(const SearchSpace& space, const Architecture& arch) {
  return {detail::stack_shape(space, arch, "Enc ", Scope::PerEncoderLayer),
          detail::stack_shape(space, arch, "Dec ", Scope::PerDecoderLayer)};
}

/// Trainable parameters of a standard Transformer with the architecture's
/// dimensions: embeddings, attention projections, FFNs, layer norms and
/// bias-free projections between adjacent layers of different widths. The
/// output projection is tied to the decoder embedding. With
/// `shared_embeddings`, encoder and decoder share one table when their widths
/// and vocabularies agree.
inline std::int64_t analytic_params(const SearchSpace& space, const Architecture& arch,
                                    std::int64_t vocab_src, std::int64_t vocab_tgt,
                                    bool shared_embeddings) {
  const TransformerShape t = transformer_shape(space, arch);
  auto attn = [](std::int64_t q, std::int64_t kv) {  // q,o from q-width; k,v from kv-width
    return 2 * (q * q + q) + 2 * (kv * q + q);
  };
  auto ffn = [](std::int64_t d, std::int64_t f) { return 2 * d * f + f + d; };
  auto stack = [&](const StackShape& s, bool cross, std::int64_t enc_out) {
    std::int64_t p = 0;
    std::int64_t prev = s.embed_dim;
    for (std::size_t l = 0; l < s.layers; ++l) {
      const std::int64_t d = s.hidden[l];
      if (d != prev) p += prev * d;
      p += attn(d, d) + ffn(d, s.ffn[l]) + 2 * 2 * d;
      if (cross) p += attn(d, enc_out) + 2 * d;
      prev = d;
    }
    if (s.layers > 0 && s.pre_ln) p += 2 * prev;
    return std::pair{p, prev};
  };
  const auto [enc_p, enc_out] = stack(t.encoder, false, 0);
  const bool cross = t.encoder.layers > 0;
  const auto [dec_p, dec_out] = stack(t.decoder, cross, enc_out);
  std::int64_t emb = vocab_tgt * t.decoder.embed_dim;
  if (t.encoder.present) {
    const bool share = shared_embeddings && vocab_src == vocab_tgt &&
                       t.encoder.embed_dim == t.decoder.embed_dim;
    if (!share) emb += vocab_src * t.encoder.embed_dim;
  }
  std::int64_t out_proj = 0;
  if (t.decoder.layers > 0 && dec_out != t.decoder.embed_dim) out_proj = dec_out * t.decoder.embed_dim;
  return enc_p + dec_p + emb + out_proj;
}

struct HardwareProfile {
  std::string name;
  double overhead_ms = 0.0;
  // cpu_like
  double ms_per_gflop = 0.0;
  // gpu_like
  double ms_per_encoder_layer = 0.0;
  double ms_per_decoder_step = 0.0;     // per decoder layer per target token
  double ms_per_attended_step = 0.0;    // per attended encoder layer per target token
  std::int64_t ffn_saturation = 0;      // widths at or below cost nothing extra
  std::int64_t hidden_saturation = 0;
  double ms_per_unit_over_saturation = 0.0;
  bool flops_driven = true;
  std::int64_t src_len = 30;
  std::int64_t tgt_len = 30;
};

inline HardwareProfile cpu_like() {
  HardwareProfile p;
  p.name = "cpu_like";
  p.overhead_ms = 5.0;
  p.ms_per_gflop = 40.0;
  p.flops_driven = true;
  return p;
}

inline HardwareProfile gpu_like() {
  HardwareProfile p;
  p.name = "gpu_like";
  p.overhead_ms = 8.0;
  p.ms_per_encoder_layer = 0.6;
  p.ms_per_decoder_step = 0.12;
  p.ms_per_attended_step = 0.01;
  p.ffn_saturation = 4096;
  p.hidden_saturation = 1024;
  p.ms_per_unit_over_saturation = 2e-5;
  p.flops_driven = false;
  return p;
}

inline HardwareProfile profile_by_name(std::string_view name) {
  if (name == "cpu_like") return cpu_like();
  if (name == "gpu_like") return gpu_like();
  throw Error(Errc::UnknownProfile, std::string(name));
}

/// FLOPs of the layer stacks for one sentence (multiply-add = 2 FLOPs);
/// excludes the vocabulary projection.
inline double layer_flops(const SearchSpace& space, const Architecture& arch,
                          std::int64_t src_len, std::int64_t tgt_len) {
  const TransformerShape t = transformer_shape(space, arch);
  const double ls = static_cast<double>(src_len);
  const double lt = static_cast<double>(tgt_len);
  double total = 0.0;
  double enc_out = static_cast<double>(t.encoder.embed_dim);
  double prev = enc_out;
  for (std::size_t l = 0; l < t.encoder.layers; ++l) {
    const double d = static_cast<double>(t.encoder.hidden[l]);
    const double f = static_cast<double>(t.encoder.ffn[l]);
    if (d != prev) total += 2.0 * prev * d * ls;
    total += 2.0 * 4.0 * d * d * ls + 4.0 * ls * ls * d + 2.0 * 2.0 * d * f * ls;
    prev = d;
    enc_out = d;
  }
  const bool cross = t.encoder.layers > 0;
  prev = static_cast<double>(t.decoder.embed_dim);
  for (std::size_t l = 0; l < t.decoder.layers; ++l) {
    const double d = static_cast<double>(t.decoder.hidden[l]);
    const double f = static_cast<double>(t.decoder.ffn[l]);
    if (d != prev) total += 2.0 * prev * d * lt;
    total += 2.0 * 4.0 * d * d * lt + 4.0 * lt * lt * d + 2.0 * 2.0 * d * f * lt;
    if (cross) {
      const double kv_len = ls * static_cast<double>(t.decoder.attended[l]);
      total += 2.0 * 2.0 * d * d * lt + 2.0 * 2.0 * enc_out * d * kv_len + 4.0 * lt * kv_len * d;
    }
    prev = d;
  }
  return total;
}

inline double analytic_flops(const SearchSpace& space, const Architecture& arch,
                             std::int64_t vocab_tgt, std::int64_t src_len, std::int64_t tgt_len) {
  const TransformerShape t = transformer_shape(space, arch);
  return layer_flops(space, arch, src_len, tgt_len) +
         2.0 * static_cast<double>(t.decoder.embed_dim) * static_cast<double>(vocab_tgt) *
             static_cast<double>(tgt_len);
}

/// cpu_like: affine in layer FLOPs. gpu_like: affine in encoder layers,
/// decoder layer-steps and attended-encoder steps, plus a term that is zero
/// while FFN and hidden widths stay at or below the saturation thresholds.
inline double analytic_latency(const SearchSpace& space, const Architecture& arch,
                               const HardwareProfile& p) {
  if (p.flops_driven)
    return p.overhead_ms + p.ms_per_gflop * layer_flops(space, arch, p.src_len, p.tgt_len) / 1e9;
  const TransformerShape t = transformer_shape(space, arch);
  const double lt = static_cast<double>(p.tgt_len);
  double ms = p.overhead_ms + p.ms_per_encoder_layer * static_cast<double>(t.encoder.layers);
  auto over = [&](std::int64_t v, std::int64_t limit) {
    return static_cast<double>(std::max<std::int64_t>(0, v - limit));
  };
  for (std::size_t l = 0; l < t.encoder.layers; ++l)
    ms += p.ms_per_unit_over_saturation *
          (over(t.encoder.ffn[l], p.ffn_saturation) + over(t.encoder.hidden[l], p.hidden_saturation));
  for (std::size_t l = 0; l < t.decoder.layers; ++l) {
    ms += p.ms_per_decoder_step * lt;
    if (t.encoder.layers > 0)
      ms += p.ms_per_attended_step * lt * static_cast<double>(t.decoder.attended[l]);
    ms += p.ms_per_unit_over_saturation * lt *
          (over(t.decoder.ffn[l], p.ffn_saturation) + over(t.decoder.hidden[l], p.hidden_saturation));
  }
  return ms;
}

inline double analytic_latency(const SearchSpace& space, const Architecture& arch,
                               std::string_view profile) {
  return analytic_latency(space, arch, profile_by_name(profile));
}

/// Drops floor(n * trim_fraction) of the smallest and of the largest samples
/// and averages the rest, summing in ascending order.
inline double trimmed_mean(std::span<const double> samples, double trim_fraction) {
  if (samples.empty()) throw Error(Errc::EmptyInput, "trimmed_mean of no samples");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw Error(Errc::InvalidArgument, "trim_fraction must be in [0, 0.5)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const auto cut = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * trim_fraction + 1e-9));
  double sum = 0.0;
  for (std::size_t i = cut; i < n - cut; ++i) sum += sorted[i];
  return sum / static_cast<double>(n - 2 * cut);
}

// ---------------------------------------------------------------------------
// Oracles

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::string id() const = 0;
  virtual std::uint64_t seed() const = 0;
  virtual const SearchSpace& space() const = 0;
  virtual EvalRecord evaluate(const Architecture& arch) const = 0;
};

struct CostSettings {
  HardwareProfile profile = cpu_like();
  std::int64_t vocab_src = 32768;
  std::int64_t vocab_tgt = 32768;
  bool shared_embeddings = true;
};

/// Synthetic quality plus analytic costs.
class SyntheticOracle final : public Oracle {
 public:
  SyntheticOracle(SearchSpace space, SyntheticOracleConfig cfg, CostSettings costs = {})
      : space_(std::move(space)), cfg_(std::move(cfg)), costs_(std::move(costs)) {
    ensure_valid(space_);
    validate_synthetic_config(space_, cfg_);
  }

  std::string id() const override { return "synthetic/" + costs_.profile.name; }
  std::uint64_t seed() const override { return cfg_.seed; }
  const SearchSpace& space() const override { return space_; }
  const SyntheticOracleConfig& config() const { return cfg_; }

  EvalRecord evaluate(const Architecture& arch) const override {
    if (auto err = check_architecture(space_, arch)) throw *err;
    EvalRecord r;
    r.arch = arch;
    r.hash = arch_hash(space_, arch);
    r.quality_loss = synthetic_quality(space_, cfg_, arch);
    r.latency_ms = analytic_latency(space_, arch, costs_.profile);
    r.params = analytic_params(space_, arch, costs_.vocab_src, costs_.vocab_tgt,
                               costs_.shared_embeddings);
    r.flops = analytic_flops(space_, arch, costs_.vocab_tgt, costs_.profile.src_len,
                             costs_.profile.tgt_len);
    r.oracle_id = id();
    r.seed = cfg_.seed;
    return r;
  }

 private:
  SearchSpace space_;
  SyntheticOracleConfig cfg_;
  CostSettings costs_;
};

/// Replays stored records keyed by architecture hash.
class TabularOracle final : public Oracle {
 public:
  TabularOracle(SearchSpace space, std::vector<EvalRecord> rows) : space_(std::move(space)) {
    for (auto& r : rows) {
      if (id_.empty()) {
        id_ = r.oracle_id;
        seed_ = r.seed;
      }
      table_.emplace(r.hash, std::move(r));
    }
  }

  std::string id() const override { return id_.empty() ? "tabular" : id_; }
  std::uint64_t seed() const override { return seed_; }
  const SearchSpace& space() const override { return space_; }

  EvalRecord evaluate(const Architecture& arch) const override {
    const std::string h = arch_hash(space_, arch);
    auto it = table_.find(h);
    if (it == table_.end()) throw Error(Errc::UnknownArchitecture, h);
    return it->second;
  }

 private:
  SearchSpace space_;
  std::unordered_map<std::string, EvalRecord> table_;
  std::string id_;
  std::uint64_t seed_ = 0;
};

/// Caching front end: repeated evaluations return the stored record.
class Evaluator {
 public:
  explicit Evaluator(const Oracle& oracle) : oracle_(oracle) {}

  EvalRecord eval(const Architecture& arch) {
    const auto key = std::tuple{oracle_.id(), oracle_.seed(), arch_hash(oracle_.space(), arch)};
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    EvalRecord r = oracle_.evaluate(arch);
    std::lock_guard lock(mu_);
    return cache_.emplace(key, std::move(r)).first->second;
  }

  std::vector<EvalRecord> batch_eval(std::span<const Architecture> archs) {
    std::vector<EvalRecord> out;
    out.reserve(archs.size());
    for (const auto& a : archs) out.push_back(eval(a));
    return out;
  }

  std::size_t cache_size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
  }

 private:
  const Oracle& oracle_;
  mutable std::mutex mu_;
  std::map<std::tuple<std::string, std::uint64_t, std::string>, EvalRecord> cache_;
};

// ---------------------------------------------------------------------------
// Record store (JSON lines)

inline nlohmann::json to_json(const SearchSpace& space, const EvalRecord& r) {
  nlohmann::json j;
  j["arch"] = to_json(space, r.arch);
  j["hash"] = r.hash;
  j["quality_loss"] = r.quality_loss;
  j["latency_ms"] = r.latency_ms;
  j["params"] = r.params;
  j["flops"] = r.flops;
  j["oracle_id"] = r.oracle_id;
  j["seed"] = r.seed;
  return j;
}

inline EvalRecord record_from_json(const SearchSpace& space, const nlohmann::json& j) {
  try {
    EvalRecord r;
    r.arch = arch_from_json(space, j.at("arch"));
    r.hash = arch_hash(space, r.arch);
    if (j.contains("hash") && j.at("hash").get<std::string>() != r.hash)
      throw Error(Errc::ParseError, "hash does not match architecture");
    for (const char* field : {"quality_loss", "latency_ms", "params", "flops"})
      if (!j.contains(field)) throw Error(Errc::MissingMetric, field);
    r.quality_loss = j.at("quality_loss").get<double>();
    r.latency_ms = j.at("latency_ms").get<double>();
    r.params = j.at("params").get<std::int64_t>();
    r.flops = j.at("flops").get<double>();
    r.oracle_id = j.value("oracle_id", "");
    r.seed = j.value("seed", std::uint64_t{0});
    if (!std::isfinite(r.quality_loss) || !std::isfinite(r.latency_ms) || !std::isfinite(r.flops) ||
        r.latency_ms < 0 || r.params < 0 || r.flops < 0)
      throw Error(Errc::ParseError, "record metrics must be finite and non-negative");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

/// Writes `text` to `path` through a temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(Errc::IoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "rename to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<EvalRecord> read_records(const std::filesystem::path& path,
                                            const SearchSpace& space) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(space, nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
  }
  return out;
}

/// Appends records to a JSON-lines store. Single writer: the file is
/// rewritten atomically with the new lines added at the end.
class RecordStore {
 public:
  RecordStore(std::filesystem::path path, SearchSpace space)
      : path_(std::move(path)), space_(std::move(space)) {}

  std::vector<EvalRecord> load() const {
    if (!std::filesystem::exists(path_)) return {};
    return read_records(path_, space_);
  }

  void append(std::span<const EvalRecord> records) {
    std::lock_guard lock(mu_);
    std::string text = std::filesystem::exists(path_) ? read_file(path_) : std::string();
    if (!text.empty() && text.back() != '\n') text += '\n';
    for (const auto& r : records) text += to_json(space_, r).dump() + "\n";
    write_file_atomic(path_, text);
  }

 private:
  std::filesystem::path path_;
  SearchSpace space_;
  std::mutex mu_;
};

}  // namespace pairnas

#endif  // PAIRNAS_ORACLE_HPP_
