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

// Randomization-based feature importance and threshold pruning.
//
// For a sample C of evaluated architectures, L_total is the summed pairwise
// loss of the ranker on all pairs built from C. Randomizing feature f
// (uniform resampling from its domain, every layer for per-layer features)
// and re-scoring gives L_f; the importance is I(f) = mean(L_f) / L_total over
// a few repetitions. Features with I(f) below a threshold are pinned to the
// value they take in an anchor architecture.

#ifndef PAIRNAS_IMPORTANCE_HPP_
#define PAIRNAS_IMPORTANCE_HPP_

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/oracle.hpp"
#include "pairnas/pairs.hpp"
#include "pairnas/random.hpp"
#include "pairnas/ranker.hpp"
#include "pairnas/space.hpp"

namespace pairnas {

inline constexpr double kThetaHardwareAware = 1.15;
inline constexpr std::size_t kSampleHardwareAware = 200;
inline constexpr double kThetaHighAccuracy = 1.25;
inline constexpr std::size_t kSampleHighAccuracy = 300;

struct ImportanceOptions {
  Metric metric = Metric::QualityLoss;
  Direction direction = Direction::LowerIsBetter;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
};

inline double total_error(const RankerModel& model, std::span<const PairExample> pairs,
                          std::span<const EncodedMatrix> encodings) {
  if (pairs.empty()) throw Error(Errc::EmptyPairSet, "total_error of no pairs");
  return total_pair_loss(score_all(model, encodings), pairs);
}

/// Resamples `feature` uniformly in every architecture, honoring fixed
/// values. Randomizing a depth feature resizes the stack: dropped layers are
/// discarded and newly active layers receive fresh uniform values.
inline std::vector<Architecture> randomize_feature(const SearchSpace& space,
                                                   std::span<const Architecture> archs,
                                                   std::string_view feature, Rng& rng) {
  const std::size_t f = space.index_of(feature);
  const FeatureDef& def = space.features[f];
  std::vector<Architecture> out(archs.begin(), archs.end());
  for (Architecture& a : out) {
    auto& c = a.choice[f];
    for (std::size_t l = 0; l < c.size(); ++l) c[l] = detail::draw(space, f, l, rng);
    if (def.controls == DepthRole::Encoder) resize_layers(space, a, Scope::PerEncoderLayer, rng);
    if (def.controls == DepthRole::Decoder) resize_layers(space, a, Scope::PerDecoderLayer, rng);
  }
  return out;
}

/// Encoding-level form: decodes, randomizes and re-encodes.
inline std::vector<EncodedMatrix> randomize_feature(std::span<const EncodedMatrix> encodings,
                                                    const SearchSpace& space,
                                                    std::string_view feature, Rng& rng) {
  space.index_of(feature);
  std::vector<Architecture> archs;
  archs.reserve(encodings.size());
  for (const auto& e : encodings) archs.push_back(decode(space, e));
  std::vector<EncodedMatrix> out;
  out.reserve(archs.size());
  for (const auto& a : randomize_feature(space, archs, feature, rng)) out.push_back(encode(space, a));
  return out;
}

namespace detail {

struct ImportanceContext {
  std::vector<Architecture> archs;
  std::vector<PairExample> pairs;
  double l_total = 0.0;
};

inline ImportanceContext importance_context(const RankerModel& model,
                                            std::span<const EvalRecord> sample,
                                            const SearchSpace& space,
                                            const ImportanceOptions& opts) {
  if (sample.size() < 2) throw Error(Errc::TooFewRecords, "importance needs n >= 2");
  ImportanceContext ctx;
  Rng unused(0);
  ctx.pairs = build_pairs(sample, opts.metric, opts.direction, std::nullopt, unused);
  if (ctx.pairs.empty()) throw Error(Errc::EmptyPairSet, "all sampled metrics tie");
  std::vector<EncodedMatrix> enc;
  for (const auto& r : sample) {
    ctx.archs.push_back(r.arch);
    enc.push_back(encode(space, r.arch));
  }
  ctx.l_total = total_error(model, ctx.pairs, enc);
  return ctx;
}

inline double importance_of(const RankerModel& model, const SearchSpace& space,
                            const ImportanceContext& ctx, std::string_view feature,
                            std::size_t repetitions, Rng& rng) {
  if (repetitions < 1) throw Error(Errc::InvalidArgument, "repetitions must be >= 1");
  double sum = 0.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto perturbed = randomize_feature(space, ctx.archs, feature, rng);
    std::vector<EncodedMatrix> enc;
    enc.reserve(perturbed.size());
    for (const auto& a : perturbed) enc.push_back(encode(space, a));
    sum += total_error(model, ctx.pairs, enc);
  }
  return (sum / static_cast<double>(repetitions)) / ctx.l_total;
}

}  // namespace detail

/// I(f) = mean over repetitions of L_f, divided by L_total.
inline double feature_importance(const RankerModel& model, std::span<const EvalRecord> sample,
                                 const SearchSpace& space, std::string_view feature, Rng& rng,
                                 const ImportanceOptions& opts = {}) {
  space.index_of(feature);
  const auto ctx = detail::importance_context(model, sample, space, opts);
  return detail::importance_of(model, space, ctx, feature, opts.repetitions, rng);
}

struct FeatureScore {
  std::string name;
  double importance = 0.0;
};

struct ImportanceReport {
  std::vector<FeatureScore> per_feature;  // declaration order
  std::size_t sample_size = 0;
  double l_total = 0.0;
  std::uint64_t seed = 0;
  std::size_t repetitions = 0;

  double of(std::string_view name) const {
    for (const auto& s : per_feature)
      if (s.name == name) return s.importance;
    throw Error(Errc::UnknownFeature, std::string(name));
  }
};

/// Scores every feature of `space`; feature f uses the sub-stream
/// "importance/<name>" of opts.seed.
inline ImportanceReport compute_importance(const RankerModel& model,
                                           std::span<const EvalRecord> sample,
                                           const SearchSpace& space,
                                           const ImportanceOptions& opts) {
  const auto ctx = detail::importance_context(model, sample, space, opts);
  ImportanceReport report;
  report.sample_size = sample.size();
  report.l_total = ctx.l_total;
  report.seed = opts.seed;
  report.repetitions = opts.repetitions;
  for (const FeatureDef& f : space.features) {
    Rng rng = make_rng(opts.seed, "importance/" + f.name);
    report.per_feature.push_back(
        {f.name, detail::importance_of(model, space, ctx, f.name, opts.repetitions, rng)});
  }
  return report;
}

struct FeatureSelection {
  std::vector<std::string> kept;  // declaration order
  std::vector<std::string> warnings;
};

inline FeatureSelection select_features(const ImportanceReport& report, double theta) {
  FeatureSelection sel;
  double max_score = 0.0;
  for (const auto& s : report.per_feature) {
    max_score = std::max(max_score, s.importance);
    if (s.importance >= theta) sel.kept.push_back(s.name);
  }
  if (sel.kept.empty() && !report.per_feature.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "threshold %.4g exceeds every score (max %.4g); no feature kept",
                  theta, max_score);
    sel.warnings.emplace_back(buf);
  }
  return sel;
}

/// Pins every feature outside `kept` to the anchor's value. Per-layer
/// features pin each layer to the anchor's value at that layer, reusing the
/// anchor's last active layer beyond its depth; a uniform anchor pins the
/// feature as a whole.
inline SearchSpace prune_space(const SearchSpace& space, std::span<const std::string> kept,
                               const Architecture& anchor) {
  if (auto err = check_architecture(space, anchor)) throw *err;
  for (const auto& k : kept) space.index_of(k);
  SearchSpace out = space;
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (std::find(kept.begin(), kept.end(), def.name) != kept.end()) continue;
    const auto& c = anchor.choice[f];
    if (!def.per_layer()) {
      out = fix_feature(out, {def.name, std::nullopt}, def.domain[c.at(0)]);
      continue;
    }
    if (c.empty()) continue;
    if (std::all_of(c.begin(), c.end(), [&](std::size_t i) { return i == c[0]; })) {
      out = fix_feature(out, {def.name, std::nullopt}, def.domain[c[0]]);
      continue;
    }
    for (std::size_t l = 0; l < space.max_layers(def.scope); ++l)
      out = fix_feature(out, {def.name, l}, def.domain[c[std::min(l, c.size() - 1)]]);
  }
  return out;
}

/// Best record of the sample under the given metric; first one wins ties.
inline const EvalRecord& best_record(std::span<const EvalRecord> records, Metric metric,
                                     Direction direction) {
  if (records.empty()) throw Error(Errc::TooFewRecords, "no records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double a = metric_value(records[i], metric), b = metric_value(records[best], metric);
    if (direction == Direction::LowerIsBetter ? a < b : a > b) best = i;
  }
  return records[best];
}

// ---------------------------------------------------------------------------
// Report rendering

/// Features sorted by descending importance, ties by name.
inline std::vector<FeatureScore> sorted_scores(const ImportanceReport& report) {
  auto s = report.per_feature;
  std::stable_sort(s.begin(), s.end(), [](const FeatureScore& a, const FeatureScore& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.name < b.name;
  });
  return s;
}

inline nlohmann::json to_json(const ImportanceReport& report, double theta,
                              const FeatureSelection& sel) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& s : sorted_scores(report)) {
    const bool kept = std::find(sel.kept.begin(), sel.kept.end(), s.name) != sel.kept.end();
    features.push_back({{"name", s.name}, {"importance", s.importance}, {"kept", kept}});
  }
  return {{"features", features},
          {"n", report.sample_size},
          {"l_total", report.l_total},
          {"theta", theta},
          {"seed", report.seed},
          {"repetitions", report.repetitions},
          {"kept", sel.kept},
          {"warnings", sel.warnings}};
}

inline ImportanceReport importance_from_json(const nlohmann::json& j) {
  try {
    ImportanceReport r;
    for (const auto& f : j.at("features"))
      r.per_feature.push_back({f.at("name").get<std::string>(), f.at("importance").get<double>()});
    r.sample_size = j.at("n").get<std::size_t>();
    r.l_total = j.at("l_total").get<double>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.repetitions = j.value("repetitions", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

inline std::string render_table(const ImportanceReport& report, double theta,
                                const FeatureSelection& sel) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %12s  %s\n", "feature", "importance", "kept");
  out += line;
  for (const auto& s : sorted_scores(report)) {
    const bool kept = std::find(sel.kept.begin(), sel.kept.end(), s.name) != sel.kept.end();
    std::snprintf(line, sizeof line, "%-20s %12.4f  %s\n", s.name.c_str(), s.importance,
                  kept ? "yes" : "no");
    out += line;
  }
  std::snprintf(line, sizeof line, "n=%zu theta=%.4g L_total=%.6g\n", report.sample_size, theta,
                report.l_total);
  out += line;
  return out;
}

}  // namespace pairnas

#endif  // PAIRNAS_IMPORTANCE_HPP_
