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

// Search strategies over a (possibly pruned) space, driven by any scorer
// mapping an Architecture to a real number where higher is better. Every
// decision compares scores only, so a strictly increasing transform of the
// scorer leaves all results unchanged. Equal scores are resolved by the
// canonical encoding order (lexicographically smaller encoding first).

#ifndef PAIRNAS_SEARCH_HPP_
#define PAIRNAS_SEARCH_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/random.hpp"
#include "pairnas/ranker.hpp"
#include "pairnas/space.hpp"

namespace pairnas {

template <class F>
concept ArchScorer = requires(const F& f, const Architecture& a) {
  { f(a) } -> std::convertible_to<double>;
};

/// Ranker-backed scorer.
struct RankerScorer {
  const SearchSpace* space;
  const RankerModel* model;
  double operator()(const Architecture& a) const { return score(*model, encode(*space, a)); }
};

/// Ranker-backed latency predictor in milliseconds (needs a calibrated model).
struct LatencyPredictor {
  const SearchSpace* space;
  const RankerModel* model;
  double operator()(const Architecture& a) const { return predict_metric(*model, encode(*space, a)); }
};

struct TraceEntry {
  std::size_t iteration = 0;
  std::size_t evaluated = 0;  // candidates scored so far, this one included
  std::string candidate_hash;
  double score = 0.0;
  double best_score = 0.0;
  std::optional<double> predicted_latency_ms;
};

struct SearchResult {
  Architecture best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace;
  std::size_t evaluated_count = 0;
  std::optional<double> best_predicted_latency_ms;
};

struct LatencyConstraint {
  double max_latency_ms = 0.0;

  void validate() const {
    if (!(max_latency_ms > 0.0) || !std::isfinite(max_latency_ms))
      throw Error(Errc::InvalidArgument, "max_latency_ms must be positive and finite");
  }
};

struct RandomSearchConfig {
  std::size_t epoch_size = 100;
  std::size_t patience = 3;  // stable epochs before stopping
  std::size_t max_epochs = 100000;
};

struct EAConfig {
  std::size_t population_size = 125;
  std::size_t parent_count = 25;
  double mutation_prob = 0.3;
  std::size_t max_iterations = 30;
  std::uint64_t seed = 0;

  void validate() const {
    if (population_size < 1 || parent_count < 1 || parent_count > population_size)
      throw Error(Errc::InvalidArgument, "need 1 <= parent_count <= population_size");
    if (!(mutation_prob > 0.0 && mutation_prob <= 1.0))
      throw Error(Errc::InvalidArgument, "mutation_prob must be in (0, 1]");
  }
};

/// Called once per scored candidate with (entry, candidate, best-so-far).
using SearchObserver =
    std::function<void(const TraceEntry&, const Architecture&, const Architecture&)>;

inline bool canonical_less(const EncodedMatrix& a, const EncodedMatrix& b) {
  return a.data < b.data;
}

namespace detail {

class Tracker {
 public:
  Tracker(const SearchSpace& space, SearchResult& result, const SearchObserver& observer)
      : space_(space), result_(result), observer_(observer) {}

  /// Returns true when `arch` becomes the new best (strictly higher score).
  bool offer(const Architecture& arch, double s, std::size_t iteration,
             std::optional<double> latency = std::nullopt) {
    const bool improved = result_.evaluated_count == 0 || s > result_.best_score;
    ++result_.evaluated_count;
    if (improved) {
      result_.best = arch;
      result_.best_score = s;
      result_.best_predicted_latency_ms = latency;
    }
    TraceEntry e{iteration, result_.evaluated_count, arch_hash(space_, arch), s, result_.best_score,
                 latency};
    if (observer_) observer_(e, arch, result_.best);
    result_.trace.push_back(std::move(e));
    return improved;
  }

 private:
  const SearchSpace& space_;
  SearchResult& result_;
  const SearchObserver& observer_;
};

}  // namespace detail

/// Uniform random search in epochs; stops once the best-so-far has not
/// changed for `patience` consecutive epochs.
template <ArchScorer Scorer>
SearchResult random_search(const SearchSpace& space, const Scorer& scorer,
                           const RandomSearchConfig& cfg, Rng& rng,
                           const SearchObserver& observer = {}) {
  ensure_valid(space);
  if (cfg.epoch_size < 1) throw Error(Errc::InvalidArgument, "epoch_size must be >= 1");
  SearchResult result;
  detail::Tracker tracker(space, result, observer);
  std::size_t stable = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs && stable < cfg.patience; ++epoch) {
    bool improved = false;
    for (std::size_t i = 0; i < cfg.epoch_size; ++i) {
      const Architecture a = sample_uniform(space, rng);
      improved = tracker.offer(a, static_cast<double>(scorer(a)), epoch) || improved;
    }
    stable = improved ? 0 : stable + 1;
  }
  return result;
}

/// Uniform-per-feature crossover of two parents followed by per-feature
/// mutation. The child's depth comes from one parent; layers beyond the
/// shorter parent's depth are drawn fresh. A mutated depth resizes the stack
/// and draws values for newly active layers. Fixed values are never touched.
inline Architecture make_offspring(const SearchSpace& space, const Architecture& a,
                                   const Architecture& b, double mutation_prob, Rng& rng) {
  auto coin = [&] { return bernoulli(rng, 0.5); };
  Architecture child;
  child.choice.resize(space.features.size());
  const Scope stacks[] = {Scope::PerEncoderLayer, Scope::PerDecoderLayer};
  for (Scope s : stacks)
    if (auto d = space.depth_feature(s)) child.choice[*d] = (coin() ? a : b).choice[*d];
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (def.controls != DepthRole::None) continue;
    if (!def.per_layer()) {
      child.choice[f] = (coin() ? a : b).choice[f];
      continue;
    }
    const std::size_t depth = active_depth(space, child, def.scope);
    const std::size_t shorter = std::min(a.choice[f].size(), b.choice[f].size());
    child.choice[f].resize(depth);
    for (std::size_t l = 0; l < depth; ++l)
      child.choice[f][l] = l < shorter ? (coin() ? a : b).choice[f][l] : detail::draw(space, f, l, rng);
  }
  for (Scope s : stacks) {
    auto d = space.depth_feature(s);
    if (!d || space.is_fixed(*d)) continue;
    if (bernoulli(rng, mutation_prob)) {
      child.choice[*d] = {uniform_index(rng, space.features[*d].domain.size())};
      resize_layers(space, child, s, rng);
    }
  }
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (def.controls != DepthRole::None) continue;
    for (std::size_t l = 0; l < child.choice[f].size(); ++l)
      if (!space.is_fixed(f, l) && bernoulli(rng, mutation_prob))
        child.choice[f][l] = uniform_index(rng, def.domain.size());
  }
  return child;
}

/// Population-based search: keep the top `parent_count`, refill with
/// offspring of random parent pairs, repeat for `max_iterations` generations.
/// Iteration 0 is the uniform initial population. Parents are not re-scored.
template <ArchScorer Scorer>
SearchResult evolutionary_search(const SearchSpace& space, const Scorer& scorer,
                                 const EAConfig& cfg, Rng& rng,
                                 const SearchObserver& observer = {}) {
  ensure_valid(space);
  cfg.validate();
  struct Member {
    Architecture arch;
    EncodedMatrix enc;
    double score;
  };
  SearchResult result;
  detail::Tracker tracker(space, result, observer);
  std::vector<Member> pop;
  pop.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    Architecture a = sample_uniform(space, rng);
    const double s = static_cast<double>(scorer(a));
    tracker.offer(a, s, 0);
    pop.push_back({a, encode(space, a), s});
  }
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    std::stable_sort(pop.begin(), pop.end(), [](const Member& x, const Member& y) {
      if (x.score != y.score) return x.score > y.score;
      return canonical_less(x.enc, y.enc);
    });
    pop.resize(cfg.parent_count);
    for (std::size_t c = cfg.parent_count; c < cfg.population_size; ++c) {
      const Member& pa = pop[uniform_index(rng, cfg.parent_count)];
      const Member& pb = pop[uniform_index(rng, cfg.parent_count)];
      Architecture child = make_offspring(space, pa.arch, pb.arch, cfg.mutation_prob, rng);
      const double s = static_cast<double>(scorer(child));
      tracker.offer(child, s, it);
      EncodedMatrix enc = encode(space, child);
      pop.push_back({std::move(child), std::move(enc), s});
    }
  }
  return result;
}

struct RankedCandidate {
  Architecture arch;
  double score = 0.0;
};

/// The k highest-scoring candidates, best first.
template <ArchScorer Scorer>
std::vector<RankedCandidate> top_k(const SearchSpace& space, std::span<const Architecture> candidates,
                                   const Scorer& scorer, std::size_t k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (k > candidates.size())
    throw Error(Errc::KExceedsCandidates,
                std::to_string(k) + " > " + std::to_string(candidates.size()));
  std::vector<double> scores(candidates.size());
  std::vector<EncodedMatrix> enc(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = static_cast<double>(scorer(candidates[i]));
    enc[i] = encode(space, candidates[i]);
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return canonical_less(enc[a], enc[b]);
                    });
  std::vector<RankedCandidate> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({candidates[order[i]], scores[order[i]]});
  return out;
}

inline constexpr std::size_t kMaxEnumeration = 1'000'000;

/// Over a whole space: exhaustive when the space has at most
/// kMaxEnumeration architectures, otherwise over `sample_count` distinct
/// uniform samples.
template <ArchScorer Scorer>
std::vector<RankedCandidate> top_k(const SearchSpace& space, const Scorer& scorer, std::size_t k,
                                   Rng& rng, std::size_t sample_count = 3000) {
  std::vector<Architecture> candidates;
  if (cardinality(space) <= kMaxEnumeration) {
    enumerate(space, [&](const Architecture& a) {
      candidates.push_back(a);
      return true;
    });
  } else {
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < sample_count; ++i) {
      Architecture a = sample_uniform(space, rng);
      if (seen.insert(arch_hash_u64(space, a)).second) candidates.push_back(std::move(a));
    }
  }
  return top_k(space, candidates, scorer, k);
}

enum class CandidateStrategy { Uniform, Evolutionary };

/// Two-stage selection: generate candidates, keep those whose predicted
/// latency meets the constraint, return the one with the best quality score.
/// The evolutionary strategy evolves on quality with infeasible candidates
/// scored -inf, running enough generations to score about
/// `candidate_count` candidates.
template <ArchScorer Latency, ArchScorer Quality>
SearchResult hardware_aware_select(const SearchSpace& space, const Latency& latency,
                                   const Quality& quality, const LatencyConstraint& constraint,
                                   std::size_t candidate_count, CandidateStrategy strategy,
                                   Rng& rng, const EAConfig& ea = {},
                                   const SearchObserver& observer = {}) {
  ensure_valid(space);
  constraint.validate();
  if (candidate_count < 1) throw Error(Errc::InvalidArgument, "candidate_count must be >= 1");
  struct Candidate {
    Architecture arch;
    double latency;
    double quality;
  };
  std::vector<Candidate> pool;
  std::unordered_set<std::uint64_t> seen;
  auto consider = [&](const Architecture& a) {
    if (!seen.insert(arch_hash_u64(space, a)).second) return;
    pool.push_back({a, static_cast<double>(latency(a)), static_cast<double>(quality(a))});
  };
  if (strategy == CandidateStrategy::Uniform) {
    for (std::size_t i = 0; i < candidate_count; ++i) consider(sample_uniform(space, rng));
  } else {
    EAConfig cfg = ea;
    cfg.validate();
    const std::size_t per_gen = cfg.population_size - cfg.parent_count;
    cfg.max_iterations = candidate_count <= cfg.population_size || per_gen == 0
                             ? 0
                             : (candidate_count - cfg.population_size + per_gen - 1) / per_gen;
    auto constrained = [&](const Architecture& a) {
      const double lat = static_cast<double>(latency(a));
      consider(a);
      return lat <= constraint.max_latency_ms ? static_cast<double>(quality(a))
                                              : -std::numeric_limits<double>::infinity();
    };
    evolutionary_search(space, constrained, cfg, rng);
  }
  SearchResult result;
  detail::Tracker tracker(space, result, observer);
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].latency <= constraint.max_latency_ms) feasible.push_back(i);
  if (feasible.empty())
    throw Error(Errc::NoFeasibleCandidate,
                "no candidate meets " + std::to_string(constraint.max_latency_ms) + " ms");
  // Rank feasible candidates by quality; the winner is replayed first so the
  // trace's best-so-far is the final answer from the first entry on.
  std::vector<EncodedMatrix> enc(pool.size());
  for (const std::size_t i : feasible) enc[i] = encode(space, pool[i].arch);
  std::stable_sort(feasible.begin(), feasible.end(), [&](std::size_t a, std::size_t b) {
    if (pool[a].quality != pool[b].quality) return pool[a].quality > pool[b].quality;
    return canonical_less(enc[a], enc[b]);
  });
  for (const std::size_t i : feasible) tracker.offer(pool[i].arch, pool[i].quality, 1, pool[i].latency);
  result.evaluated_count = pool.size();
  return result;
}

// ---------------------------------------------------------------------------
// Output

inline std::string trace_to_jsonl(const SearchResult& r) {
  std::string out;
  for (const auto& e : r.trace) {
    nlohmann::json j{{"iteration", e.iteration},
                     {"evaluated", e.evaluated},
                     {"candidate_hash", e.candidate_hash},
                     {"score", e.score},
                     {"best_score", e.best_score}};
    if (e.predicted_latency_ms) j["predicted_latency_ms"] = *e.predicted_latency_ms;
    out += j.dump() + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const SearchSpace& space, const SearchResult& r,
                              std::string_view strategy) {
  nlohmann::json j{{"strategy", strategy},
                   {"best", to_json(space, r.best)},
                   {"best_hash", arch_hash(space, r.best)},
                   {"best_score", r.best_score},
                   {"evaluated_count", r.evaluated_count}};
  if (r.best_predicted_latency_ms) j["best_predicted_latency_ms"] = *r.best_predicted_latency_ms;
  return j;
}

}  // namespace pairnas

#endif  // PAIRNAS_SEARCH_HPP_
