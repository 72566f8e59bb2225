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


// pairnas command-line front end.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pairnas/pairnas.hpp"

namespace {

using namespace pairnas;
namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kOracle = 3,
  kTraining = 4,
  kImportance = 5,
  kSearch = 6,
};

// Errors that come from malformed input rather than from the stage itself.
bool is_config_error(Errc c) {
  switch (c) {
    case Errc::EmptyDomain:
    case Errc::DuplicateFeature:
    case Errc::DuplicateValue:
    case Errc::NonIncreasingDomain:
    case Errc::NonPositiveOrdinal:
    case Errc::DepthOutOfRange:
    case Errc::FixedValueOutOfDomain:
    case Errc::UnknownFeature:
    case Errc::IncompleteAssignment:
    case Errc::InvalidArchitecture:
    case Errc::FormatVersionMismatch:
    case Errc::ShapeMismatch:
    case Errc::MissingMetric:
    case Errc::InvalidArgument:
    case Errc::IoError:
    case Errc::ParseError:
      return true;
    default:
      return false;
  }
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  bool quiet = false;
  RunConfig cfg;
};

std::uint64_t require_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (g.cfg.seed) return *g.cfg.seed;
  throw Error(Errc::InvalidArgument, "--seed is required (or \"seed\" in the config file)");
}

void emit(const Globals& g, const std::string& text) {
  if (!g.quiet) std::cout << text << (text.empty() || text.back() != '\n' ? "\n" : "");
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

RankerModel load_model(const fs::path& path) {
  try {
    return load(path);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

// --- space -----------------------------------------------------------------

struct SpaceArgs {
  std::string action;
  std::optional<std::string> space;
  std::size_t n = 1;
};

int cmd_space(const Globals& g, const SpaceArgs& a) {
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  if (a.action == "show") {
    emit(g, dump(to_json(space)));
  } else if (a.action == "count") {
    emit(g, cardinality(space).str());
  } else {
    Rng rng = make_rng(require_seed(g), "sampling");
    std::string out;
    for (const auto& arch : sample_distinct(space, a.n, rng)) out += to_json(space, arch).dump() + "\n";
    emit(g, out);
  }
  return kOk;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::optional<std::string> space;
  std::optional<std::string> oracle;
  std::optional<std::string> profile;
  std::optional<double> noise;
  std::optional<std::string> table;
  std::optional<std::size_t> n;
  std::string out;
  bool allow_dup = false;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const std::uint64_t seed = require_seed(g);
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  OracleSpec spec = g.cfg.oracle;
  if (a.oracle) spec.kind = *a.oracle;
  if (a.profile) spec.profile = *a.profile;
  if (a.noise) spec.noise_sigma = *a.noise;
  if (a.table) spec.table = *a.table;
  const std::size_t n = a.n.value_or(g.cfg.sample_n);

  RecordStore store(a.out, space);
  const auto existing = store.load();
  std::unordered_set<std::string> present;
  for (const auto& r : existing) present.insert(r.hash);

  std::vector<EvalRecord> fresh;
  try {
    const auto oracle = make_oracle(space, spec, seed);
    fresh = evaluate_sample(space, *oracle, n, seed);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument || e.code() == Errc::IoError || e.code() == Errc::ParseError)
      throw;
    std::cerr << "error: oracle failure: " << e.what() << "\n";
    return kOracle;
  }
  std::vector<EvalRecord> added;
  for (auto& r : fresh)
    if (a.allow_dup || present.insert(r.hash).second) added.push_back(std::move(r));
  store.append(added);
  if (!g.quiet)
    std::cerr << "appended " << added.size() << " of " << fresh.size() << " records to " << a.out << "\n";
  return kOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::optional<std::string> space;
  std::string records;
  std::string metric = "quality_loss";
  std::optional<std::string> direction;
  std::optional<double> val_fraction;
  std::string out;
  std::optional<std::string> report;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const std::uint64_t seed = require_seed(g);
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  const Metric metric = metric_from_string(a.metric);
  const Direction direction = a.direction ? direction_from_string(*a.direction)
                              : metric == Metric::QualityLoss ? Direction::LowerIsBetter
                                                              : Direction::HigherIsBetter;
  const auto records = read_records(a.records, space);
  TrainConfig cfg = g.cfg.ranker;
  cfg.validate();
  TrainOutcome t;
  try {
    t = train_ranker(space, records, metric, direction, cfg, a.val_fraction.value_or(g.cfg.val_fraction),
                     seed);
  } catch (const Error& e) {
    if (is_config_error(e.code())) throw;
    std::cerr << "error: training failed: " << e.what() << "\n";
    return kTraining;
  }
  save(t.model, a.out);
  if (a.report) write_file_atomic(*a.report, dump(t.report));
  emit(g, dump(t.report));
  return kOk;
}

// --- importance ------------------------------------------------------------

struct ImportanceArgs {
  std::optional<std::string> space;
  std::string model;
  std::string records;
  std::optional<std::string> latency_model;
  std::optional<double> max_latency;
  std::optional<double> theta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> repetitions;
  std::string out;
};

int cmd_importance(const Globals& g, const ImportanceArgs& a) {
  const std::uint64_t seed = require_seed(g);
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  const auto records = read_records(a.records, space);
  const RankerModel quality = load_model(a.model);
  std::optional<RankerModel> latency;
  if (a.latency_model) latency = load_model(*a.latency_model);
  ImportanceInputs in;
  in.quality_model = &quality;
  in.latency_model = latency ? &*latency : nullptr;
  in.max_latency_ms = a.max_latency ? a.max_latency : g.cfg.max_latency_ms;
  in.theta = a.theta.value_or(g.cfg.importance.theta);
  in.n = a.n.value_or(g.cfg.importance.n);
  in.repetitions = a.repetitions.value_or(g.cfg.importance.repetitions);
  nlohmann::json report;
  std::string table;
  try {
    report = importance_step(space, records, in, seed, &table);
  } catch (const Error& e) {
    if (is_config_error(e.code())) throw;
    std::cerr << "error: importance failed: " << e.what() << "\n";
    return kImportance;
  }
  write_file_atomic(a.out, dump(report));
  for (const auto& w : report.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
  emit(g, table);
  return kOk;
}

// --- search ----------------------------------------------------------------

struct SearchArgs {
  std::optional<std::string> space;
  std::string model;
  std::optional<std::string> latency_model;
  std::optional<double> max_latency;
  std::optional<std::string> strategy;
  std::optional<std::string> importance_report;
  std::optional<std::size_t> candidates;
  std::string out;
  std::optional<std::string> trace;
};

int cmd_search(const Globals& g, const SearchArgs& a) {
  const std::uint64_t seed = require_seed(g);
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  const RankerModel quality = load_model(a.model);
  std::optional<RankerModel> latency;
  if (a.latency_model) latency = load_model(*a.latency_model);
  std::optional<nlohmann::json> report;
  if (a.importance_report) report = read_json(*a.importance_report);
  SearchInputs in;
  in.quality_model = &quality;
  in.latency_model = latency ? &*latency : nullptr;
  in.max_latency_ms = a.max_latency ? a.max_latency : g.cfg.max_latency_ms;
  in.importance_report = report ? &*report : nullptr;
  in.spec = g.cfg.search;
  if (a.strategy) in.spec.strategy = *a.strategy;
  if (a.candidates) in.spec.candidate_count = *a.candidates;
  SearchOutcome s;
  try {
    s = search_step(space, in, seed);
  } catch (const Error& e) {
    if (is_config_error(e.code())) throw;
    std::cerr << "error: search failed: " << e.what() << "\n";
    return kSearch;
  }
  write_file_atomic(a.out, dump(s.result_json));
  write_file_atomic(a.trace.value_or(sibling(a.out, ".trace.jsonl").string()), s.trace_jsonl);
  emit(g, dump(s.result_json));
  return kOk;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::optional<std::string> space;
  std::string model;
  std::string records;
  std::string metric = "quality_loss";
  std::optional<std::string> direction;
  std::optional<std::string> out;
  std::optional<std::string> csv;
};

int cmd_report(const Globals& g, const ReportArgs& a) {
  const SearchSpace space = load_space(a.space.value_or(g.cfg.space));
  const Metric metric = metric_from_string(a.metric);
  const Direction direction = a.direction ? direction_from_string(*a.direction)
                              : metric == Metric::QualityLoss ? Direction::LowerIsBetter
                                                              : Direction::HigherIsBetter;
  const auto records = read_records(a.records, space);
  const RankerModel model = load_model(a.model);
  const EvalMetrics m = evaluate_model(space, model, records, metric, direction);
  const nlohmann::json j = {{"n", m.n},
                            {"metric", metric_name(metric)},
                            {"kendall_tau", m.kendall_tau},
                            {"spearman_rho", m.spearman_rho},
                            {"pair_accuracy", m.pair_accuracy}};
  if (a.out) write_file_atomic(*a.out, dump(j));
  if (a.csv) {
    std::string text = "hash,score," + std::string(metric_name(metric)) + "\n";
    for (const auto& r : records) {
      std::ostringstream line;
      line.precision(17);
      line << r.hash << "," << score(model, encode(space, r.arch)) << "," << metric_value(r, metric) << "\n";
      text += line.str();
    }
    write_file_atomic(*a.csv, text);
  }
  emit(g, dump(j));
  return kOk;
}

// --- pipeline --------------------------------------------------------------

struct PipelineArgs {
  std::optional<std::string> out_dir;
};

int cmd_pipeline(const Globals& g, const PipelineArgs& a) {
  RunConfig cfg = g.cfg;
  cfg.seed = require_seed(g);
  if (a.out_dir) cfg.output_dir = *a.out_dir;
  PipelineOutputs p;
  try {
    p = run_pipeline(cfg);
  } catch (const Error& e) {
    if (is_config_error(e.code())) throw;
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::EmptyPairSet:
      case Errc::DegenerateSplit:
      case Errc::TooFewRecords:
        return kTraining;
      case Errc::NoFeasibleCandidate:
      case Errc::KExceedsCandidates:
        return kSearch;
      default:
        return kOracle;
    }
  }
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const SearchSpace space = load_space(cfg.space);
  std::string records;
  for (const auto& r : p.records) records += to_json(space, r).dump() + "\n";
  write_file_atomic(dir / "records.jsonl", records);
  save(p.quality.model, dir / "model.json");
  write_file_atomic(dir / "train_report.json", dump(p.quality.report));
  if (p.latency) {
    save(p.latency->model, dir / "latency_model.json");
    write_file_atomic(dir / "latency_train_report.json", dump(p.latency->report));
  }
  if (p.importance) write_file_atomic(dir / "importance.json", dump(*p.importance));
  write_file_atomic(dir / "result.json", dump(p.search.result_json));
  write_file_atomic(dir / "result.trace.jsonl", p.search.trace_jsonl);
  emit(g, dump(p.search.result_json));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairnas: pairwise-ranking architecture search"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Top-level seed; all randomness derives from it");
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--quiet", g.quiet, "Suppress stdout output");

  SpaceArgs space_args;
  auto* space_cmd = app.add_subcommand("space", "Show, count or sample a search space");
  space_cmd->add_option("action", space_args.action)
      ->required()
      ->check(CLI::IsMember({"show", "count", "sample"}));
  space_cmd->add_option("--space", space_args.space, "Preset name or space JSON path");
  space_cmd->add_option("--n", space_args.n, "Number of architectures to sample");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Sample and evaluate architectures");
  eval_cmd->add_option("--space", eval_args.space);
  eval_cmd->add_option("--oracle", eval_args.oracle, "synthetic or tabular");
  eval_cmd->add_option("--profile", eval_args.profile, "Hardware profile for latency");
  eval_cmd->add_option("--noise", eval_args.noise, "Synthetic quality noise sigma");
  eval_cmd->add_option("--table", eval_args.table, "Record file backing a tabular oracle");
  eval_cmd->add_option("--n", eval_args.n);
  eval_cmd->add_option("--out", eval_args.out)->required();
  eval_cmd->add_flag("--allow-dup", eval_args.allow_dup, "Append records already present");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a pairwise ranker");
  train_cmd->add_option("--space", train_args.space);
  train_cmd->add_option("--records", train_args.records)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--metric", train_args.metric);
  train_cmd->add_option("--direction", train_args.direction, "lower or higher");
  train_cmd->add_option("--val-fraction", train_args.val_fraction);
  train_cmd->add_option("--out", train_args.out)->required();
  train_cmd->add_option("--report", train_args.report, "Also write the training report here");

  ImportanceArgs imp_args;
  auto* imp_cmd = app.add_subcommand("importance", "Permutation feature importance");
  imp_cmd->add_option("--space", imp_args.space);
  imp_cmd->add_option("--model", imp_args.model)->required()->check(CLI::ExistingFile);
  imp_cmd->add_option("--records", imp_args.records)->required()->check(CLI::ExistingFile);
  imp_cmd->add_option("--latency-model", imp_args.latency_model)->check(CLI::ExistingFile);
  imp_cmd->add_option("--max-latency", imp_args.max_latency);
  imp_cmd->add_option("--theta", imp_args.theta);
  imp_cmd->add_option("--n", imp_args.n, "Sample size (first n records)");
  imp_cmd->add_option("--repetitions", imp_args.repetitions);
  imp_cmd->add_option("--out", imp_args.out)->required();

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Search the (optionally pruned) space");
  search_cmd->add_option("--space", search_args.space);
  search_cmd->add_option("--model", search_args.model)->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--latency-model", search_args.latency_model)->check(CLI::ExistingFile);
  search_cmd->add_option("--max-latency", search_args.max_latency);
  search_cmd->add_option("--strategy", search_args.strategy, "rs or ea");
  search_cmd->add_option("--importance-report", search_args.importance_report)->check(CLI::ExistingFile);
  search_cmd->add_option("--candidates", search_args.candidates, "Stage-one candidate count");
  search_cmd->add_option("--out", search_args.out)->required();
  search_cmd->add_option("--trace", search_args.trace, "Trace path (default <out>.trace.jsonl)");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Rank agreement of a model with records");
  report_cmd->add_option("--space", report_args.space);
  report_cmd->add_option("--model", report_args.model)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--records", report_args.records)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--metric", report_args.metric);
  report_cmd->add_option("--direction", report_args.direction);
  report_cmd->add_option("--out", report_args.out);
  report_cmd->add_option("--csv", report_args.csv, "Per-record scores as CSV");

  PipelineArgs pipe_args;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage in one invocation");
  pipe_cmd->add_option("--out-dir", pipe_args.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (!g.config_path.empty()) g.cfg = run_config_from_json(read_json(g.config_path));
    if (*space_cmd) return cmd_space(g, space_args);
    if (*eval_cmd) return cmd_evaluate(g, eval_args);
    if (*train_cmd) return cmd_train(g, train_args);
    if (*imp_cmd) return cmd_importance(g, imp_args);
    if (*search_cmd) return cmd_search(g, search_args);
    if (*report_cmd) return cmd_report(g, report_args);
    if (*pipe_cmd) return cmd_pipeline(g, pipe_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kConfig : kOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
