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

// End-to-end workflow: sample -> evaluate -> train -> importance -> prune ->
// search. Each stage is a function of its inputs and the run seed; stage
// randomness comes from named sub-streams of that seed ("sampling", "split",
// "importance", "search") so stages can be rerun independently.

#ifndef PAIRNAS_PIPELINE_HPP_
#define PAIRNAS_PIPELINE_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/importance.hpp"
#include "pairnas/metrics.hpp"
#include "pairnas/oracle.hpp"
#include "pairnas/pairs.hpp"
#include "pairnas/random.hpp"
#include "pairnas/ranker.hpp"
#include "pairnas/search.hpp"
#include "pairnas/space.hpp"

namespace pairnas {

struct OracleSpec {
  std::string kind = "synthetic";  // synthetic | tabular
  double noise_sigma = 0.05;
  std::string profile = "cpu_like";
  std::string table;  // tabular: path of an eval-record file
  std::optional<SyntheticOracleConfig> synthetic;
  std::int64_t vocab_src = 32768;
  std::int64_t vocab_tgt = 32768;
  bool shared_embeddings = true;
};

struct ImportanceSpec {
  std::size_t n = kSampleHighAccuracy;
  double theta = kThetaHighAccuracy;
  std::size_t repetitions = 5;
  bool enabled = true;
};

struct SearchSpec {
  std::string strategy = "ea";  // rs | ea
  RandomSearchConfig rs;
  EAConfig ea;
  std::size_t candidate_count = 3000;
};

struct RunConfig {
  std::string space = "synthetic-small";
  OracleSpec oracle;
  TrainConfig ranker;
  double val_fraction = 0.2;
  std::size_t sample_n = 300;
  ImportanceSpec importance;
  SearchSpec search;
  std::optional<double> max_latency_ms;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.space = j.value("space", c.space);
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      c.oracle.kind = o.value("kind", c.oracle.kind);
      c.oracle.noise_sigma = o.value("noise_sigma", c.oracle.noise_sigma);
      c.oracle.profile = o.value("profile", c.oracle.profile);
      c.oracle.table = o.value("table", c.oracle.table);
      c.oracle.vocab_src = o.value("vocab_src", c.oracle.vocab_src);
      c.oracle.vocab_tgt = o.value("vocab_tgt", c.oracle.vocab_tgt);
      c.oracle.shared_embeddings = o.value("shared_embeddings", c.oracle.shared_embeddings);
      if (o.contains("synthetic")) c.oracle.synthetic = synthetic_config_from_json(o.at("synthetic"));
    }
    if (j.contains("ranker")) c.ranker = j.at("ranker").get<TrainConfig>();
    c.val_fraction = j.value("val_fraction", c.val_fraction);
    c.sample_n = j.value("sample_n", c.sample_n);
    if (j.contains("importance")) {
      const auto& i = j.at("importance");
      c.importance.n = i.value("n", c.importance.n);
      c.importance.theta = i.value("theta", c.importance.theta);
      c.importance.repetitions = i.value("repetitions", c.importance.repetitions);
      c.importance.enabled = i.value("enabled", c.importance.enabled);
    }
    if (j.contains("search")) {
      const auto& s = j.at("search");
      c.search.strategy = s.value("strategy", c.search.strategy);
      c.search.rs.epoch_size = s.value("epoch_size", c.search.rs.epoch_size);
      c.search.ea.population_size = s.value("population_size", c.search.ea.population_size);
      c.search.ea.parent_count = s.value("parent_count", c.search.ea.parent_count);
      c.search.ea.mutation_prob = s.value("mutation_prob", c.search.ea.mutation_prob);
      c.search.ea.max_iterations = s.value("max_iterations", c.search.ea.max_iterations);
      c.search.candidate_count = s.value("candidate_count", c.search.candidate_count);
    }
    if (j.contains("constraint") && !j.at("constraint").is_null())
      c.max_latency_ms = j.at("constraint").at("max_latency_ms").get<double>();
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("config: ") + e.what());
  }
}

/// Preset name, or path of a space-definition JSON file.
inline SearchSpace load_space(const std::string& name_or_path) {
  for (const auto& p : preset_names())
    if (p == name_or_path) return preset_by_name(p);
  if (!std::filesystem::exists(name_or_path))
    throw Error(Errc::InvalidArgument, "unknown preset or missing file '" + name_or_path + "'");
  SearchSpace s;
  try {
    s = space_from_json(nlohmann::json::parse(read_file(name_or_path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, name_or_path + ": " + e.what());
  }
  ensure_valid(s);
  return s;
}

inline std::unique_ptr<Oracle> make_oracle(const SearchSpace& space, const OracleSpec& spec,
                                           std::uint64_t seed) {
  if (spec.kind == "synthetic") {
    SyntheticOracleConfig cfg = spec.synthetic ? *spec.synthetic
                                               : default_synthetic_config(space, seed, spec.noise_sigma);
    CostSettings costs{profile_by_name(spec.profile), spec.vocab_src, spec.vocab_tgt,
                       spec.shared_embeddings};
    return std::make_unique<SyntheticOracle>(space, std::move(cfg), std::move(costs));
  }
  if (spec.kind == "tabular") {
    if (spec.table.empty()) throw Error(Errc::InvalidArgument, "tabular oracle needs a table path");
    return std::make_unique<TabularOracle>(space, read_records(spec.table, space));
  }
  throw Error(Errc::InvalidArgument, "unknown oracle kind '" + spec.kind + "'");
}

/// `n` distinct uniform architectures whose hashes are not in `exclude`.
inline std::vector<Architecture> sample_distinct(const SearchSpace& space, std::size_t n, Rng& rng,
                                                 const std::unordered_set<std::string>& exclude = {}) {
  const BigInt card = cardinality(space);
  if (BigInt(n) + BigInt(exclude.size()) > card)
    throw Error(Errc::InvalidArgument, "cannot draw " + std::to_string(n) +
                                           " distinct architectures from " + card.str());
  std::vector<Architecture> out;
  std::unordered_set<std::string> seen = exclude;
  while (out.size() < n) {
    Architecture a = sample_uniform(space, rng);
    if (seen.insert(arch_hash(space, a)).second) out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<EvalRecord> evaluate_sample(const SearchSpace& space, const Oracle& oracle,
                                               std::size_t n, std::uint64_t seed,
                                               const std::unordered_set<std::string>& exclude = {}) {
  Rng rng = make_rng(seed, "sampling");
  const auto archs = sample_distinct(space, n, rng, exclude);
  Evaluator ev(oracle);
  return ev.batch_eval(archs);
}

struct TrainOutcome {
  RankerModel model;
  nlohmann::json report;
};

/// Splits by architecture, builds pairs on each side, trains, and (for
/// latency) fits a score -> milliseconds calibration on all records.
inline TrainOutcome train_ranker(const SearchSpace& space, std::span<const EvalRecord> records,
                                 Metric metric, Direction direction, TrainConfig cfg,
                                 double val_fraction, std::uint64_t seed) {
  Rng split_rng = make_rng(seed, "split");
  const RecordSplit split = split_by_architecture(records, val_fraction, split_rng);
  Rng pair_rng = make_rng(seed, "pairs");
  auto train_pairs = build_pairs(split.train, metric, direction, std::nullopt, pair_rng);
  auto val_pairs = build_pairs(split.val, metric, direction, std::nullopt, pair_rng);
  if (train_pairs.empty() || val_pairs.empty())
    throw Error(Errc::EmptyPairSet, "all metric values tie; no pairs to learn from");
  std::vector<EncodedMatrix> enc;
  for (const auto& r : split.train) enc.push_back(encode(space, r.arch));
  for (const auto& r : split.val) enc.push_back(encode(space, r.arch));
  for (auto& p : val_pairs) {
    p.left += split.train.size();
    p.right += split.train.size();
  }
  cfg.seed = seed;
  TrainOutcome out;
  out.model = train(train_pairs, val_pairs, enc, cfg);
  if (metric == Metric::Latency) {
    std::vector<double> scores, targets;
    for (const auto& r : records) {
      scores.push_back(score(out.model, encode(space, r.arch)));
      targets.push_back(r.latency_ms);
    }
    out.model.calibration = IsotonicCalibration::fit(scores, targets);
  }
  out.report = {{"metric", metric_name(metric)},
                {"direction", direction == Direction::LowerIsBetter ? "lower" : "higher"},
                {"train_architectures", split.train.size()},
                {"val_architectures", split.val.size()},
                {"train_pairs", train_pairs.size()},
                {"val_pairs", val_pairs.size()},
                {"rounds_used", out.model.meta.best_round},
                {"rounds_trained", out.model.meta.rounds_trained},
                {"max_rounds", cfg.max_rounds},
                {"val_accuracy", out.model.meta.best_val_accuracy}};
  return out;
}

struct ImportanceInputs {
  const RankerModel* quality_model = nullptr;
  const RankerModel* latency_model = nullptr;  // optional
  std::optional<double> max_latency_ms;        // restricts the anchor
  double theta = kThetaHighAccuracy;
  std::size_t n = kSampleHighAccuracy;
  std::size_t repetitions = 5;
};

/// Importance report JSON with the kept set and the pruning anchor (best
/// quality record of the sample, among those meeting the latency constraint
/// when one is given). With a latency model, a feature is kept when either
/// model rates it at or above theta.
inline nlohmann::json importance_step(const SearchSpace& space, std::span<const EvalRecord> records,
                                      const ImportanceInputs& in, std::uint64_t seed,
                                      std::string* table = nullptr) {
  if (!in.quality_model) throw Error(Errc::InvalidArgument, "quality model required");
  const auto sample = records.subspan(0, std::min(in.n, records.size()));
  ImportanceOptions opts;
  opts.repetitions = in.repetitions;
  opts.seed = derive_seed(seed, "importance");
  const ImportanceReport report = compute_importance(*in.quality_model, sample, space, opts);
  FeatureSelection sel = select_features(report, in.theta);
  nlohmann::json j = to_json(report, in.theta, sel);
  if (table) *table = render_table(report, in.theta, sel);
  if (in.latency_model) {
    ImportanceOptions lopts = opts;
    lopts.metric = Metric::Latency;
    lopts.direction = Direction::HigherIsBetter;
    lopts.seed = derive_seed(seed, "importance-latency");
    const ImportanceReport lat = compute_importance(*in.latency_model, sample, space, lopts);
    const FeatureSelection lsel = select_features(lat, in.theta);
    std::vector<std::string> kept;
    for (const auto& f : space.features) {
      const auto has = [&](const FeatureSelection& s) {
        return std::find(s.kept.begin(), s.kept.end(), f.name) != s.kept.end();
      };
      if (has(sel) || has(lsel)) kept.push_back(f.name);
    }
    sel.kept = kept;
    j["latency"] = to_json(lat, in.theta, lsel);
    j["kept"] = kept;
    if (table) *table += "\nlatency model\n" + render_table(lat, in.theta, lsel);
  }
  std::vector<EvalRecord> pool;
  for (const auto& r : sample)
    if (!in.max_latency_ms || r.latency_ms <= *in.max_latency_ms) pool.push_back(r);
  if (pool.empty()) pool.assign(sample.begin(), sample.end());
  const EvalRecord& anchor = best_record(pool, Metric::QualityLoss, Direction::LowerIsBetter);
  j["anchor"] = to_json(space, anchor.arch);
  j["anchor_hash"] = anchor.hash;
  return j;
}

inline SearchSpace prune_from_report(const SearchSpace& space, const nlohmann::json& report) {
  try {
    const auto kept = report.at("kept").get<std::vector<std::string>>();
    const Architecture anchor = arch_from_json(space, report.at("anchor"));
    return prune_space(space, kept, anchor);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("importance report: ") + e.what());
  }
}

struct SearchInputs {
  const RankerModel* quality_model = nullptr;
  const RankerModel* latency_model = nullptr;
  std::optional<double> max_latency_ms;
  const nlohmann::json* importance_report = nullptr;
  SearchSpec spec;
};

struct SearchOutcome {
  SearchSpace searched_space;
  SearchResult result;
  nlohmann::json result_json;
  std::string trace_jsonl;
};

inline SearchOutcome search_step(const SearchSpace& space, const SearchInputs& in,
                                 std::uint64_t seed) {
  if (!in.quality_model) throw Error(Errc::InvalidArgument, "quality model required");
  SearchOutcome out;
  out.searched_space = in.importance_report ? prune_from_report(space, *in.importance_report) : space;
  const SearchSpace& s = out.searched_space;
  Rng rng = make_rng(seed, "search");
  RankerScorer quality{&s, in.quality_model};
  EAConfig ea = in.spec.ea;
  ea.seed = seed;
  std::string strategy = in.spec.strategy;
  if (strategy != "rs" && strategy != "ea")
    throw Error(Errc::InvalidArgument, "unknown strategy '" + strategy + "'");
  if (in.max_latency_ms) {
    if (!in.latency_model) throw Error(Errc::InvalidArgument, "latency model required with a constraint");
    LatencyPredictor latency{&s, in.latency_model};
    out.result = hardware_aware_select(
        s, latency, quality, LatencyConstraint{*in.max_latency_ms}, in.spec.candidate_count,
        strategy == "rs" ? CandidateStrategy::Uniform : CandidateStrategy::Evolutionary, rng, ea);
    strategy = "hardware_aware/" + strategy;
  } else if (strategy == "rs") {
    out.result = random_search(s, quality, in.spec.rs, rng);
  } else {
    out.result = evolutionary_search(s, quality, ea, rng);
  }
  out.result_json = to_json(s, out.result, strategy);
  out.result_json["pruned"] = in.importance_report != nullptr;
  out.result_json["searched_cardinality"] = cardinality(s).str();
  out.trace_jsonl = trace_to_jsonl(out.result);
  return out;
}

struct EvalMetrics {
  double kendall_tau = 0.0;
  double spearman_rho = 0.0;
  double pair_accuracy = 0.0;
  std::size_t n = 0;
};

/// Rank agreement between model scores and a record metric. Scores are
/// compared with the metric oriented so that higher means better.
inline EvalMetrics evaluate_model(const SearchSpace& space, const RankerModel& model,
                                  std::span<const EvalRecord> records, Metric metric,
                                  Direction direction) {
  std::vector<EncodedMatrix> enc;
  std::vector<double> predicted, actual;
  for (const auto& r : records) {
    enc.push_back(encode(space, r.arch));
    predicted.push_back(score(model, enc.back()));
    const double v = metric_value(r, metric);
    actual.push_back(direction == Direction::LowerIsBetter ? -v : v);
  }
  Rng unused(0);
  const auto pairs = build_pairs(records, metric, direction, std::nullopt, unused);
  EvalMetrics m;
  m.n = records.size();
  m.kendall_tau = kendall_tau(predicted, actual);
  m.spearman_rho = spearman_rho(predicted, actual);
  m.pair_accuracy = pair_accuracy_from_scores(predicted, pairs);
  return m;
}

struct PipelineOutputs {
  std::vector<EvalRecord> records;
  TrainOutcome quality;
  std::optional<TrainOutcome> latency;
  std::optional<nlohmann::json> importance;
  SearchOutcome search;
};

/// Single-invocation run of the whole workflow.
inline PipelineOutputs run_pipeline(const RunConfig& cfg) {
  if (!cfg.seed) throw Error(Errc::InvalidArgument, "a seed is required");
  const std::uint64_t seed = *cfg.seed;
  const SearchSpace space = load_space(cfg.space);
  const auto oracle = make_oracle(space, cfg.oracle, seed);
  PipelineOutputs out;
  out.records = evaluate_sample(space, *oracle, cfg.sample_n, seed);
  out.quality = train_ranker(space, out.records, Metric::QualityLoss, Direction::LowerIsBetter,
                             cfg.ranker, cfg.val_fraction, seed);
  if (cfg.max_latency_ms)
    out.latency = train_ranker(space, out.records, Metric::Latency, Direction::HigherIsBetter,
                               cfg.ranker, cfg.val_fraction, seed);
  if (cfg.importance.enabled) {
    ImportanceInputs in;
    in.quality_model = &out.quality.model;
    in.latency_model = out.latency ? &out.latency->model : nullptr;
    in.max_latency_ms = cfg.max_latency_ms;
    in.theta = cfg.importance.theta;
    in.n = cfg.importance.n;
    in.repetitions = cfg.importance.repetitions;
    out.importance = importance_step(space, out.records, in, seed);
  }
  SearchInputs sin;
  sin.quality_model = &out.quality.model;
  sin.latency_model = out.latency ? &out.latency->model : nullptr;
  sin.max_latency_ms = cfg.max_latency_ms;
  sin.importance_report = out.importance ? &*out.importance : nullptr;
  sin.spec = cfg.search;
  out.search = search_step(space, sin, seed);
  return out;
}

}  // namespace pairnas

#endif  // PAIRNAS_PIPELINE_HPP_
