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


#include <algorithm>
#include <filesystem>
#include <numeric>

#include <gtest/gtest.h>

#include "pairnas/oracle.hpp"
#include "test_util.hpp"

namespace pairnas {
namespace {

using testing::global;
using testing::ints;
using testing::per_decoder;

Architecture uniform_translation(const SearchSpace& s, std::int64_t emb, std::int64_t ffn,
                                 std::int64_t heads, std::string norm) {
  Architecture a;
  a.choice.resize(s.features.size());
  for (std::size_t f = 0; f < s.features.size(); ++f) {
    const FeatureDef& def = s.features[f];
    std::size_t idx = 0;
    if (def.name.ends_with("Emb Dim")) idx = *def.index_of(emb);
    else if (def.name.ends_with("FFN Dim")) idx = *def.index_of(ffn);
    else if (def.name.ends_with("Head Num")) idx = *def.index_of(heads);
    else if (def.name.ends_with("Norm Type")) idx = *def.index_of(norm);
    else if (def.name.ends_with("Layer Num")) idx = def.domain.size() - 1;
    const std::size_t n = def.per_layer() ? 6 : 1;
    a.choice[f].assign(n, idx);
  }
  EXPECT_FALSE(check_architecture(s, a));
  return a;
}

// Closed-form count for a post-LN encoder-decoder with equal widths in every
// layer and one shared embedding table tied to the output projection.
std::int64_t closed_form_params(std::int64_t d, std::int64_t f, std::int64_t layers, std::int64_t vocab) {
  const std::int64_t attn = 4 * (d * d + d);
  const std::int64_t ffn = 2 * d * f + f + d;
  const std::int64_t enc = attn + ffn + 2 * 2 * d;
  const std::int64_t dec = 2 * attn + ffn + 3 * 2 * d;
  return vocab * d + layers * (enc + dec);
}

TEST(SyntheticQuality, ZeroWeightsGiveZero) {
  const auto s = preset_synthetic_small();
  SyntheticOracleConfig cfg;
  cfg.relevant_weights = {{"Dec Emb Dim", 0.0}};
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(synthetic_quality(s, cfg, sample_uniform(s, rng)), 0.0);
}

TEST(SyntheticQuality, SingleWeightIsIndexMap) {
  SearchSpace s;
  s.features = {global("x", ints({10, 20, 30}))};
  SyntheticOracleConfig cfg;
  cfg.relevant_weights = {{"x", 1.0}};
  std::vector<double> losses;
  for (const auto& a : testing::all_architectures(s)) losses.push_back(synthetic_quality(s, cfg, a));
  std::sort(losses.begin(), losses.end());
  EXPECT_EQ(losses, (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(SyntheticQuality, PerLayerUsesMeanIndex) {
  const auto s = preset_synthetic_small();
  SyntheticOracleConfig cfg;
  cfg.relevant_weights = {{"Dec FFN Dim", 1.0}};
  Architecture a;
  a.choice = {{1}, {0}, {0, 2}, {0, 0}, {0, 0}, {0}};
  EXPECT_DOUBLE_EQ(synthetic_quality(s, cfg, a), 1.0);
}

TEST(SyntheticQuality, NullFeaturesAreIgnored) {
  const auto s = preset_synthetic_small();
  const auto cfg = synthetic_small_config(3, 0.0);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto a = sample_uniform(s, rng);
    auto b = a;
    for (const auto& name : cfg.null_features) {
      const std::size_t f = s.index_of(name);
      for (auto& c : b.choice[f]) c = (c + 1) % s.features[f].domain.size();
    }
    EXPECT_EQ(synthetic_quality(s, cfg, a), synthetic_quality(s, cfg, b));
  }
}

TEST(SyntheticQuality, NoiseKeyedByArchitecture) {
  const auto s = preset_synthetic_small();
  const auto cfg = synthetic_small_config(5, 0.05);
  Rng rng(3);
  const auto a = sample_uniform(s, rng);
  const double first = synthetic_quality(s, cfg, a);
  sample_uniform(s, rng);
  EXPECT_EQ(synthetic_quality(s, cfg, a), first);
  EXPECT_NE(first, synthetic_quality_true(s, cfg, a));
}

TEST(SyntheticQuality, ConfigValidation) {
  const auto s = preset_synthetic_small();
  auto cfg = synthetic_small_config(1, 0.0);
  cfg.relevant_weights["Nope"] = 1.0;
  EXPECT_THROW(SyntheticOracle(s, cfg), Error);
  auto overlap = synthetic_small_config(1, 0.0);
  overlap.null_features.insert("Dec Emb Dim");
  EXPECT_THROW(SyntheticOracle(s, overlap), Error);
  Rng rng(1);
  const auto a = sample_uniform(s, rng);
  try {
    SyntheticOracleConfig c;
    c.relevant_weights = {{"Nope", 1.0}};
    synthetic_quality(s, c, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownWeightedFeature);
  }
}

TEST(SyntheticQuality, ConfigJsonRoundTrip) {
  const auto cfg = synthetic_small_config(11, 0.05);
  EXPECT_EQ(to_json(synthetic_config_from_json(to_json(cfg))), to_json(cfg));
}

TEST(AnalyticParams, EmptyModel) {
  SearchSpace s;
  s.features = {global("Dec Emb Dim", ints({512}))};
  Architecture a{{{0}}};
  EXPECT_EQ(analytic_params(s, a, 0, 0, true), 0);
}

TEST(AnalyticParams, TransformerBigClosedForm) {
  const auto s = preset_wmt_high_acc();
  const auto a = uniform_translation(s, 1024, 4096, 16, "Post-LN");
  const std::int64_t p = analytic_params(s, a, 32768, 32768, true);
  EXPECT_EQ(p, closed_form_params(1024, 4096, 6, 32768));
  EXPECT_EQ(p, 209911808);
}

TEST(AnalyticParams, IwsltBaseClosedForm) {
  const auto s = preset_iwslt_high_acc();
  const auto a = uniform_translation(s, 512, 1024, 4, "Post-LN");
  EXPECT_EQ(analytic_params(s, a, 10000, 10000, true), closed_form_params(512, 1024, 6, 10000));
}

TEST(AnalyticParams, PreLnAddsFinalNorms) {
  const auto s = preset_iwslt_high_acc();
  const auto post = uniform_translation(s, 512, 1024, 4, "Post-LN");
  const auto pre = uniform_translation(s, 512, 1024, 4, "Pre-LN");
  EXPECT_EQ(analytic_params(s, pre, 0, 0, true) - analytic_params(s, post, 0, 0, true), 2 * 2 * 512);
}

// One FFN block holds two weight matrices (2*emb*ffn) and a bias of width
// ffn, so doubling ffn adds 2*emb*ffn + ffn.
TEST(AnalyticParams, DoublingFfnOnOneLayer) {
  SearchSpace s;
  s.max_decoder_layers = 1;
  s.features = {global("Dec Emb Dim", ints({256})), per_decoder("Dec FFN Dim", ints({1024, 2048}))};
  Architecture narrow{{{0}, {0}}}, wide{{{0}, {1}}};
  const std::int64_t emb = 256, ffn = 1024;
  EXPECT_EQ(analytic_params(s, wide, 100, 100, true) - analytic_params(s, narrow, 100, 100, true),
            2 * emb * ffn + ffn);
}

// Without sharing: matching the encoder width would otherwise merge the two
// embedding tables and shrink the count.
TEST(AnalyticParams, MonotoneInDimensions) {
  const auto s = preset_iwslt_high_acc();
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto a = sample_uniform(s, rng);
    const auto base = analytic_params(s, a, 10000, 10000, false);
    for (std::size_t f = 0; f < s.features.size(); ++f) {
      const FeatureDef& def = s.features[f];
      if (def.kind != Kind::Ordinal || def.controls != DepthRole::None) continue;
      auto b = a;
      for (auto& c : b.choice[f]) c = def.domain.size() - 1;
      EXPECT_GE(analytic_params(s, b, 10000, 10000, false), base) << def.name;
    }
  }
}

TEST(AnalyticParams, MissingDimensionFeature) {
  SearchSpace s;
  s.max_decoder_layers = 1;
  s.features = {per_decoder("Dec FFN Dim", ints({1024}))};
  Architecture a{{{0}}};
  try {
    analytic_params(s, a, 1, 1, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingDimensionFeature);
  }
}

TEST(AnalyticLatency, CpuIncreasesWithFfn) {
  const auto s = preset_iwslt_high_acc();
  double prev = 0.0;
  for (std::int64_t ffn : {768, 1024, 1536, 2048}) {
    const double ms = analytic_latency(s, uniform_translation(s, 512, ffn, 4, "Pre-LN"), "cpu_like");
    EXPECT_GT(ms, prev) << ffn;
    prev = ms;
  }
}

TEST(AnalyticLatency, GpuFlatBelowSaturation) {
  const auto s = preset_iwslt_high_acc();
  const double first = analytic_latency(s, uniform_translation(s, 512, 768, 4, "Pre-LN"), "gpu_like");
  for (std::int64_t ffn : {1024, 1536, 2048})
    EXPECT_EQ(analytic_latency(s, uniform_translation(s, 512, ffn, 4, "Pre-LN"), "gpu_like"), first);
  const auto wmt = preset_wmt_high_acc();
  EXPECT_GT(analytic_latency(wmt, uniform_translation(wmt, 1024, 5120, 16, "Pre-LN"), "gpu_like"),
            analytic_latency(wmt, uniform_translation(wmt, 1024, 4096, 16, "Pre-LN"), "gpu_like"));
}

TEST(AnalyticLatency, ZeroLayersIsOverhead) {
  SearchSpace s;
  s.features = {global("Dec Emb Dim", ints({512}))};
  Architecture a{{{0}}};
  EXPECT_EQ(analytic_latency(s, a, "cpu_like"), cpu_like().overhead_ms);
  EXPECT_EQ(analytic_latency(s, a, "gpu_like"), gpu_like().overhead_ms);
}

TEST(AnalyticLatency, UnknownProfile) {
  try {
    profile_by_name("tpu");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownProfile);
  }
}

TEST(TrimmedMean, Examples) {
  EXPECT_EQ(trimmed_mean(std::vector<double>{5}, 0.1), 5.0);
  EXPECT_EQ(trimmed_mean(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 100}, 0.1), 5.5);
  for (double f : {0.0, 0.1, 0.25, 0.49}) EXPECT_EQ(trimmed_mean(std::vector<double>(7, 2.5), f), 2.5);
  EXPECT_THROW(trimmed_mean(std::vector<double>{}, 0.1), Error);
}

TEST(TrimmedMean, BoundsAndZeroTrim) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-3.0, 7.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(1 + t * 3);
    for (auto& v : x) v = u(rng);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (double f : {0.0, 0.1, 0.3}) {
      const double m = trimmed_mean(x, f);
      EXPECT_GE(m, *lo);
      EXPECT_LE(m, *hi);
    }
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_DOUBLE_EQ(trimmed_mean(x, 0.0),
                     std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(x.size()));
  }
}

TEST(Evaluator, CachesAndPreservesOrder) {
  const auto s = preset_synthetic_small();
  SyntheticOracle oracle(s, synthetic_small_config(1, 0.05));
  Evaluator ev(oracle);
  Rng rng(6);
  std::vector<Architecture> archs;
  for (int i = 0; i < 10; ++i) archs.push_back(sample_uniform(s, rng));
  const auto recs = ev.batch_eval(archs);
  ASSERT_EQ(recs.size(), archs.size());
  for (std::size_t i = 0; i < archs.size(); ++i) {
    EXPECT_EQ(recs[i].arch, archs[i]);
    const auto again = ev.eval(archs[i]);
    EXPECT_EQ(again.quality_loss, recs[i].quality_loss);
    EXPECT_EQ(again.latency_ms, recs[i].latency_ms);
  }
}

TEST(RecordStore, TabularRoundTrip) {
  const auto s = preset_synthetic_small();
  const auto recs = testing::synthetic_records(s, synthetic_small_config(2, 0.05), 25, 7);
  const auto path = std::filesystem::temp_directory_path() / "pairnas_records_test.jsonl";
  std::filesystem::remove(path);
  RecordStore store(path, s);
  store.append(std::span(recs).first(10));
  store.append(std::span(recs).subspan(10));
  const auto loaded = store.load();
  ASSERT_EQ(loaded.size(), recs.size());
  TabularOracle table(s, loaded);
  for (const auto& r : recs) {
    const auto t = table.evaluate(r.arch);
    EXPECT_EQ(t.quality_loss, r.quality_loss);
    EXPECT_EQ(t.latency_ms, r.latency_ms);
    EXPECT_EQ(t.params, r.params);
    EXPECT_EQ(t.flops, r.flops);
    EXPECT_EQ(t.hash, r.hash);
  }
  Rng rng(8);
  Architecture missing;
  do {
    missing = sample_uniform(s, rng);
  } while (std::any_of(recs.begin(), recs.end(), [&](const EvalRecord& r) { return r.arch == missing; }));
  try {
    table.evaluate(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownArchitecture);
  }
  std::filesystem::remove(path);
}

TEST(RecordStore, RejectsBadRecords) {
  const auto s = preset_synthetic_small();
  auto rec = testing::synthetic_records(s, synthetic_small_config(2, 0.05), 1, 7)[0];
  auto j = to_json(s, rec);
  j["latency_ms"] = -1.0;
  EXPECT_THROW(record_from_json(s, j), Error);
  j = to_json(s, rec);
  j.erase("flops");
  try {
    record_from_json(s, j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingMetric);
  }
}

}  // namespace
}  // namespace pairnas
