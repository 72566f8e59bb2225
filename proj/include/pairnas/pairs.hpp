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

#ifndef PAIRNAS_PAIRS_HPP_
#define PAIRNAS_PAIRS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/oracle.hpp"
#include "pairnas/random.hpp"

namespace pairnas {

enum class Direction { LowerIsBetter, HigherIsBetter };

inline Direction direction_from_string(std::string_view s) {
  if (s == "lower" || s == "lower_is_better") return Direction::LowerIsBetter;
  if (s == "higher" || s == "higher_is_better") return Direction::HigherIsBetter;
  throw Error(Errc::InvalidArgument, "unknown direction " + std::string(s));
}

/// Ordered pair of record indices; label 1 means `left` is the better one.
struct PairExample {
  std::size_t left = 0;
  std::size_t right = 0;
  int label = 0;
  bool operator==(const PairExample&) const = default;
};

/// Emits (i, j, P) and (j, i, 1 - P) for every selected unordered pair whose
/// metric values differ. Ties are skipped. With `max_pairs`, that many
/// unordered pairs are drawn uniformly without replacement from the eligible
/// ones.
inline std::vector<PairExample> build_pairs(std::span<const EvalRecord> records, Metric metric,
                                            Direction direction,
                                            std::optional<std::size_t> max_pairs, Rng& rng) {
  if (records.size() < 2) throw Error(Errc::TooFewRecords, "need at least 2 records");
  std::vector<double> values(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    values[i] = metric_value(records[i], metric);
    if (!std::isfinite(values[i]))
      throw Error(Errc::MissingMetric, std::string(metric_name(metric)) + " not finite");
  }
  std::vector<std::pair<std::size_t, std::size_t>> eligible;
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = i + 1; j < records.size(); ++j)
      if (values[i] != values[j]) eligible.emplace_back(i, j);
  if (max_pairs && *max_pairs < eligible.size()) {
    std::vector<std::pair<std::size_t, std::size_t>> picked;
    picked.reserve(*max_pairs);
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(picked), *max_pairs, rng);
    eligible = std::move(picked);
  }
  std::vector<PairExample> out;
  out.reserve(2 * eligible.size());
  for (const auto& [i, j] : eligible) {
    const bool i_better = direction == Direction::LowerIsBetter ? values[i] < values[j]
                                                                : values[i] > values[j];
    const int label = i_better ? 1 : 0;
    out.push_back({i, j, label});
    out.push_back({j, i, 1 - label});
  }
  return out;
}

struct RecordSplit {
  std::vector<EvalRecord> train;
  std::vector<EvalRecord> val;
};

/// Partitions records by architecture (records sharing a hash stay together);
/// round(n_arch * val_fraction) architectures go to validation. Both sides
/// keep input order.
inline RecordSplit split_by_architecture(std::span<const EvalRecord> records, double val_fraction,
                                         Rng& rng) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw Error(Errc::InvalidArgument, "val_fraction must be in (0, 1)");
  std::vector<std::string> hashes;
  std::map<std::string, bool> seen;
  for (const auto& r : records)
    if (seen.emplace(r.hash, false).second) hashes.push_back(r.hash);
  std::shuffle(hashes.begin(), hashes.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(hashes.size()) * val_fraction + 0.5));
  if (n_val == 0 || n_val >= hashes.size())
    throw Error(Errc::DegenerateSplit, "split leaves one side empty");
  for (std::size_t i = 0; i < n_val; ++i) seen[hashes[i]] = true;
  RecordSplit out;
  for (const auto& r : records) (seen[r.hash] ? out.val : out.train).push_back(r);
  return out;
}

inline std::string pairs_to_jsonl(std::span<const PairExample> pairs,
                                  std::span<const EvalRecord> records) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::json j{{"left_hash", records[p.left].hash},
                     {"right_hash", records[p.right].hash},
                     {"label", p.label}};
    out += j.dump() + "\n";
  }
  return out;
}

/// Inverse of pairs_to_jsonl against the same record list.
inline std::vector<PairExample> pairs_from_jsonl(std::string_view text,
                                                 std::span<const EvalRecord> records) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].hash, i);
  auto lookup = [&](const std::string& h) {
    auto it = index.find(h);
    if (it == index.end()) throw Error(Errc::UnknownArchitecture, h);
    return it->second;
  };
  std::vector<PairExample> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const int label = j.at("label").get<int>();
      if (label != 0 && label != 1) throw Error(Errc::ParseError, "label must be 0 or 1");
      out.push_back({lookup(j.at("left_hash").get<std::string>()),
                     lookup(j.at("right_hash").get<std::string>()), label});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, e.what());
    }
  }
  return out;
}

}  // namespace pairnas

#endif  // PAIRNAS_PAIRS_HPP_
