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

// Pairwise ranking model: an additive ensemble of regression trees trained
// with second-order boosting on the logistic pairwise cross-entropy
//
//   P_ij = 1 / (1 + exp(-(s_i - s_j)))
//   L_ij = (1 - Pbar_ij) (s_i - s_j) + log(1 + exp(-(s_i - s_j)))
//
// Every round accumulates per-architecture gradients and Hessians over all
// training pairs, fits one tree by exact greedy search with Newton leaf
// values, and adds it with shrinkage. Training stops once validation pair
// accuracy has not improved for `early_stopping_rounds` rounds; the returned
// model is truncated to the best validation round.

#ifndef PAIRNAS_RANKER_HPP_
#define PAIRNAS_RANKER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/oracle.hpp"
#include "pairnas/pairs.hpp"
#include "pairnas/space.hpp"

namespace pairnas {

inline constexpr int kModelFormatVersion = 1;

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_leaves = 30;
  std::size_t max_depth = 6;
  std::size_t early_stopping_rounds = 5;
  std::size_t max_rounds = 500;
  double l2_lambda = 1.0;
  std::size_t min_samples_per_leaf = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning_rate must be > 0");
    if (max_depth < 1) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");
    if (max_leaves < 2) throw Error(Errc::InvalidArgument, "max_leaves must be >= 2");
    if (early_stopping_rounds < 1)
      throw Error(Errc::InvalidArgument, "early_stopping_rounds must be >= 1");
    if (!(l2_lambda >= 0.0)) throw Error(Errc::InvalidArgument, "l2_lambda must be >= 0");
    if (min_samples_per_leaf < 1)
      throw Error(Errc::InvalidArgument, "min_samples_per_leaf must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate},
       {"max_leaves", c.max_leaves},
       {"max_depth", c.max_depth},
       {"early_stopping_rounds", c.early_stopping_rounds},
       {"max_rounds", c.max_rounds},
       {"l2_lambda", c.l2_lambda},
       {"min_samples_per_leaf", c.min_samples_per_leaf},
       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  const TrainConfig d;
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.max_leaves = j.value("max_leaves", d.max_leaves);
  c.max_depth = j.value("max_depth", d.max_depth);
  c.early_stopping_rounds = j.value("early_stopping_rounds", d.early_stopping_rounds);
  c.max_rounds = j.value("max_rounds", d.max_rounds);
  c.l2_lambda = j.value("l2_lambda", d.l2_lambda);
  c.min_samples_per_leaf = j.value("min_samples_per_leaf", d.min_samples_per_leaf);
  c.seed = j.value("seed", d.seed);
}

// ---------------------------------------------------------------------------
// Pairwise logistic loss

inline double sigmoid(double d) {
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

/// Probability that i beats j.
inline double pair_prob(double s_i, double s_j) { return sigmoid(s_i - s_j); }

inline double pair_loss(double s_i, double s_j, int label) {
  const double d = s_i - s_j;
  return (1.0 - label) * d + softplus(-d);
}

struct GradHess {
  double grad = 0.0;  // dL/ds_i; dL/ds_j = -grad
  double hess = 0.0;  // d2L/ds_i2 = d2L/ds_j2
};

inline GradHess pair_grad_hess(double s_i, double s_j, int label) {
  const double p = sigmoid(s_i - s_j);
  return {p - label, p * (1.0 - p)};
}

// ---------------------------------------------------------------------------
// Trees

struct TreeNode {
  std::int32_t cell = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[cell] < threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return cell < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t leaf_index(std::span<const double> x) const {
    std::size_t n = 0;
    while (!nodes[n].is_leaf())
      n = static_cast<std::size_t>(x[nodes[n].cell] < nodes[n].threshold ? nodes[n].left
                                                                         : nodes[n].right);
    return n;
  }

  double predict(std::span<const double> x) const { return nodes[leaf_index(x)].value; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [n, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[n].is_leaf()) {
        stack.emplace_back(static_cast<std::size_t>(nodes[n].left), d + 1);
        stack.emplace_back(static_cast<std::size_t>(nodes[n].right), d + 1);
      }
    }
    return best;
  }

  bool operator==(const RegressionTree&) const = default;
};

struct SplitChoice {
  std::size_t cell = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

namespace detail {

// Gains closer than this (relative) count as tied. Equal partitions reached
// through different cells sum in different orders and may differ by rounding.
inline constexpr double kGainTieTolerance = 1e-12;

/// Best split of the samples `idx` under the exact greedy rule. Cells are
/// scanned in ascending order and thresholds ascending within a cell; only a
/// clearly larger gain replaces the incumbent.
inline std::optional<SplitChoice> best_split(std::span<const EncodedMatrix> x,
                                             std::span<const double> g,
                                             std::span<const double> h,
                                             std::span<const std::size_t> idx,
                                             const TrainConfig& cfg) {
  const std::size_t n = idx.size();
  if (n < 2 * cfg.min_samples_per_leaf) return std::nullopt;
  double G = 0.0, H = 0.0;
  for (const std::size_t i : idx) {
    G += g[i];
    H += h[i];
  }
  const double lambda = cfg.l2_lambda;
  const double parent = G * G / (H + lambda);
  const std::size_t cells = x[idx[0]].data.size();
  std::vector<std::size_t> order(idx.begin(), idx.end());
  std::optional<SplitChoice> best;
  for (std::size_t c = 0; c < cells; ++c) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x[a].data[c] < x[b].data[c];
    });
    double gl = 0.0, hl = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      gl += g[order[k]];
      hl += h[order[k]];
      const double lo = x[order[k]].data[c];
      const double hi = x[order[k + 1]].data[c];
      if (!(lo < hi)) continue;
      const std::size_t nl = k + 1;
      if (nl < cfg.min_samples_per_leaf || n - nl < cfg.min_samples_per_leaf) continue;
      const double gr = G - gl, hr = H - hl;
      const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
      if (!best || gain > best->gain + kGainTieTolerance * std::max(1.0, std::abs(best->gain)))
        best = SplitChoice{c, lo + (hi - lo) / 2.0, gain};
    }
  }
  if (best && !(best->gain > 0.0)) return std::nullopt;
  return best;
}

}  // namespace detail

/// Grows one tree best-first: the open leaf with the largest positive gain is
/// split next (ties go to the older leaf) until max_leaves is reached or no
/// leaf above max_depth has a positive-gain split.
inline RegressionTree fit_tree(std::span<const EncodedMatrix> x, std::span<const double> grads,
                               std::span<const double> hessians, const TrainConfig& cfg) {
  if (x.empty()) throw Error(Errc::EmptyInput, "fit_tree on no samples");
  if (grads.size() != x.size() || hessians.size() != x.size())
    throw Error(Errc::InvalidArgument, "fit_tree inputs differ in length");
  cfg.validate();
  struct Open {
    std::size_t node;
    std::size_t depth;
    std::vector<std::size_t> idx;
    std::optional<SplitChoice> split;
  };
  auto examine = [&](Open& o) {
    o.split = o.depth < cfg.max_depth ? detail::best_split(x, grads, hessians, o.idx, cfg)
                                      : std::nullopt;
  };
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<Open> open;
  {
    Open root{0, 0, std::vector<std::size_t>(x.size()), std::nullopt};
    std::iota(root.idx.begin(), root.idx.end(), std::size_t{0});
    examine(root);
    open.push_back(std::move(root));
  }
  std::size_t leaves = 1;
  while (leaves < cfg.max_leaves) {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < open.size(); ++k) {
      if (!open[k].split) continue;
      if (!pick || open[k].split->gain > open[*pick].split->gain ||
          (open[k].split->gain == open[*pick].split->gain && open[k].node < open[*pick].node))
        pick = k;
    }
    if (!pick) break;
    Open parent = std::move(open[*pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(*pick));
    const SplitChoice s = *parent.split;
    Open l{tree.nodes.size(), parent.depth + 1, {}, std::nullopt};
    Open r{tree.nodes.size() + 1, parent.depth + 1, {}, std::nullopt};
    for (const std::size_t i : parent.idx)
      (x[i].data[s.cell] < s.threshold ? l.idx : r.idx).push_back(i);
    TreeNode& p = tree.nodes[parent.node];
    p.cell = static_cast<std::int32_t>(s.cell);
    p.threshold = s.threshold;
    p.left = static_cast<std::int32_t>(l.node);
    p.right = static_cast<std::int32_t>(r.node);
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    examine(l);
    examine(r);
    open.push_back(std::move(l));
    open.push_back(std::move(r));
    ++leaves;
  }
  for (const Open& o : open) {
    double G = 0.0, H = 0.0;
    for (const std::size_t i : o.idx) {
      G += grads[i];
      H += hessians[i];
    }
    tree.nodes[o.node].value = -G / (H + cfg.l2_lambda);
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Isotonic calibration (score -> metric units)

/// Non-decreasing step map fitted by pool-adjacent-violators. Scores between
/// two blocks map to the upper block.
struct IsotonicCalibration {
  std::vector<double> score_lo;
  std::vector<double> score_hi;
  std::vector<double> value;

  static IsotonicCalibration fit(std::span<const double> scores, std::span<const double> targets) {
    if (scores.empty() || scores.size() != targets.size())
      throw Error(Errc::InvalidArgument, "calibration needs equal, non-empty inputs");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    struct Block {
      double lo, hi, sum;
      std::size_t count;
      double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    for (const std::size_t i : order) {
      if (!blocks.empty() && blocks.back().hi == scores[i]) {
        blocks.back().sum += targets[i];
        ++blocks.back().count;
      } else {
        blocks.push_back({scores[i], scores[i], targets[i], 1});
      }
      while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
        Block top = blocks.back();
        blocks.pop_back();
        blocks.back().hi = top.hi;
        blocks.back().sum += top.sum;
        blocks.back().count += top.count;
      }
    }
    IsotonicCalibration c;
    for (const Block& b : blocks) {
      c.score_lo.push_back(b.lo);
      c.score_hi.push_back(b.hi);
      c.value.push_back(b.mean());
    }
    return c;
  }

  double operator()(double score) const {
    auto it = std::lower_bound(score_hi.begin(), score_hi.end(), score);
    if (it == score_hi.end()) return value.back();
    return value[static_cast<std::size_t>(it - score_hi.begin())];
  }

  bool operator==(const IsotonicCalibration&) const = default;
};

// ---------------------------------------------------------------------------
// Model

struct TrainingMeta {
  TrainConfig config;
  std::size_t rounds_trained = 0;  // rounds run before stopping
  std::size_t best_round = 0;      // trees kept
  double best_val_accuracy = 0.0;
};

struct RankerModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;
  std::size_t rows = 0;  // M
  std::size_t cols = 0;  // N
  TrainingMeta meta;
  std::optional<IsotonicCalibration> calibration;
};

inline double score(const RankerModel& model, const EncodedMatrix& x) {
  if (x.rows != model.rows || x.cols != model.cols)
    throw Error(Errc::ShapeMismatch, "input " + std::to_string(x.rows) + "x" +
                                         std::to_string(x.cols) + ", model " +
                                         std::to_string(model.rows) + "x" +
                                         std::to_string(model.cols));
  double sum = 0.0;
  for (const auto& t : model.trees) sum += t.predict(x.data);
  return model.base_score + model.learning_rate * sum;
}

inline std::vector<double> score_all(const RankerModel& model, std::span<const EncodedMatrix> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = score(model, xs[i]);
  return out;
}

/// Calibrated prediction in metric units; requires a calibration map.
inline double predict_metric(const RankerModel& model, const EncodedMatrix& x) {
  if (!model.calibration) throw Error(Errc::InvalidArgument, "model has no calibration");
  return (*model.calibration)(score(model, x));
}

/// Fraction of pairs ordered as labelled; exact score ties count as wrong.
inline double pair_accuracy_from_scores(std::span<const double> scores,
                                        std::span<const PairExample> pairs) {
  if (pairs.empty()) throw Error(Errc::EmptyPairSet, "pair_accuracy of no pairs");
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const double si = scores[p.left], sj = scores[p.right];
    if (p.label == 1 ? si > sj : sj > si) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

inline double total_pair_loss(std::span<const double> scores, std::span<const PairExample> pairs) {
  double sum = 0.0;
  for (const auto& p : pairs) sum += pair_loss(scores[p.left], scores[p.right], p.label);
  return sum;
}

struct TrainingTrace {
  std::vector<double> train_loss;    // after each round, index 0 = before training
  std::vector<double> val_accuracy;  // same indexing
};

inline RankerModel train(std::span<const PairExample> train_pairs,
                         std::span<const PairExample> val_pairs,
                         std::span<const EncodedMatrix> encodings, const TrainConfig& cfg,
                         TrainingTrace* trace = nullptr) {
  cfg.validate();
  if (train_pairs.empty()) throw Error(Errc::EmptyPairSet, "no training pairs");
  if (val_pairs.empty()) throw Error(Errc::EmptyPairSet, "no validation pairs");
  if (encodings.empty()) throw Error(Errc::EmptyInput, "no encodings");
  const std::size_t rows = encodings[0].rows, cols = encodings[0].cols;
  for (const auto& e : encodings)
    if (e.rows != rows || e.cols != cols) throw Error(Errc::ShapeMismatch, "mixed encodings");
  for (auto pairs : {train_pairs, val_pairs})
    for (const auto& p : pairs)
      if (p.left >= encodings.size() || p.right >= encodings.size())
        throw Error(Errc::InvalidArgument, "pair references a missing encoding");

  std::set<std::size_t> used;
  for (const auto& p : train_pairs) {
    used.insert(p.left);
    used.insert(p.right);
  }
  const std::vector<std::size_t> train_ids(used.begin(), used.end());
  std::vector<EncodedMatrix> train_x;
  train_x.reserve(train_ids.size());
  for (const std::size_t i : train_ids) train_x.push_back(encodings[i]);

  RankerModel model;
  model.learning_rate = cfg.learning_rate;
  model.rows = rows;
  model.cols = cols;
  model.meta.config = cfg;

  std::vector<double> scores(encodings.size(), model.base_score);
  std::vector<double> g(encodings.size()), h(encodings.size());
  std::vector<double> tg(train_ids.size()), th(train_ids.size());

  double best_acc = pair_accuracy_from_scores(scores, val_pairs);
  std::size_t best_round = 0, stale = 0, round = 0;
  if (trace) {
    trace->train_loss = {total_pair_loss(scores, train_pairs)};
    trace->val_accuracy = {best_acc};
  }
  while (round < cfg.max_rounds) {
    ++round;
    std::fill(g.begin(), g.end(), 0.0);
    std::fill(h.begin(), h.end(), 0.0);
    for (const auto& p : train_pairs) {
      const GradHess gh = pair_grad_hess(scores[p.left], scores[p.right], p.label);
      g[p.left] += gh.grad;
      h[p.left] += gh.hess;
      g[p.right] -= gh.grad;
      h[p.right] += gh.hess;
    }
    for (std::size_t k = 0; k < train_ids.size(); ++k) {
      tg[k] = g[train_ids[k]];
      th[k] = h[train_ids[k]];
    }
    RegressionTree tree = fit_tree(train_x, tg, th, cfg);
    for (std::size_t i = 0; i < encodings.size(); ++i)
      scores[i] += cfg.learning_rate * tree.predict(encodings[i].data);
    model.trees.push_back(std::move(tree));

    const double acc = pair_accuracy_from_scores(scores, val_pairs);
    if (trace) {
      trace->train_loss.push_back(total_pair_loss(scores, train_pairs));
      trace->val_accuracy.push_back(acc);
    }
    if (acc > best_acc) {
      best_acc = acc;
      best_round = round;
      stale = 0;
    } else if (++stale >= cfg.early_stopping_rounds) {
      break;
    }
  }
  model.trees.resize(best_round);
  model.meta.rounds_trained = round;
  model.meta.best_round = best_round;
  model.meta.best_val_accuracy = best_acc;
  return model;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const RankerModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) nodes.push_back({{"value", n.value}});
      else
        nodes.push_back({{"cell", n.cell},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
    }
    trees.push_back({{"nodes", nodes}});
  }
  nlohmann::json j;
  j["format"] = "pairnas-ranker";
  j["format_version"] = kModelFormatVersion;
  j["config"] = m.meta.config;
  j["feature_shape"] = {m.rows, m.cols};
  j["base_score"] = m.base_score;
  j["learning_rate"] = m.learning_rate;
  j["training_meta"] = {{"seed", m.meta.config.seed},
                        {"rounds_trained", m.meta.rounds_trained},
                        {"best_round", m.meta.best_round},
                        {"best_val_accuracy", m.meta.best_val_accuracy}};
  if (m.calibration)
    j["calibration"] = {{"score_lo", m.calibration->score_lo},
                        {"score_hi", m.calibration->score_hi},
                        {"value", m.calibration->value}};
  j["trees"] = trees;
  return j;
}

inline RankerModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format_version", -1) != kModelFormatVersion)
      throw Error(Errc::FormatVersionMismatch,
                  "expected version " + std::to_string(kModelFormatVersion));
    RankerModel m;
    m.meta.config = j.at("config").get<TrainConfig>();
    m.rows = j.at("feature_shape").at(0).get<std::size_t>();
    m.cols = j.at("feature_shape").at(1).get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    const auto& meta = j.at("training_meta");
    m.meta.rounds_trained = meta.at("rounds_trained").get<std::size_t>();
    m.meta.best_round = meta.at("best_round").get<std::size_t>();
    m.meta.best_val_accuracy = meta.at("best_val_accuracy").get<double>();
    if (j.contains("calibration")) {
      const auto& c = j.at("calibration");
      m.calibration = IsotonicCalibration{c.at("score_lo").get<std::vector<double>>(),
                                          c.at("score_hi").get<std::vector<double>>(),
                                          c.at("value").get<std::vector<double>>()};
      const auto& cal = *m.calibration;
      if (cal.value.empty() || cal.score_lo.size() != cal.value.size() ||
          cal.score_hi.size() != cal.value.size() ||
          !std::is_sorted(cal.score_hi.begin(), cal.score_hi.end()))
        throw Error(Errc::ParseError, "malformed calibration");
    }
    const std::size_t cells = m.rows * m.cols;
    for (const auto& jt : j.at("trees")) {
      RegressionTree t;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("cell")) {
          n.cell = jn.at("cell").get<std::int32_t>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<std::int32_t>();
          n.right = jn.at("right").get<std::int32_t>();
        } else {
          n.value = jn.at("value").get<double>();
        }
        t.nodes.push_back(n);
      }
      if (t.nodes.empty()) throw Error(Errc::ParseError, "empty tree");
      // Children always follow their parent, which rules out cycles.
      const auto size = static_cast<std::int32_t>(t.nodes.size());
      for (std::int32_t i = 0; i < size; ++i) {
        const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) continue;
        if (static_cast<std::size_t>(n.cell) >= cells || n.left <= i || n.right <= i ||
            n.left >= size || n.right >= size)
          throw Error(Errc::ParseError, "tree node out of range");
      }
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

inline void save(const RankerModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(model).dump(2) + "\n");
}

inline RankerModel load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return model_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace pairnas

#endif  // PAIRNAS_RANKER_HPP_
