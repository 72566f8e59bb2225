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

#ifndef PAIRNAS_METRICS_HPP_
#define PAIRNAS_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pairnas/error.hpp"
#include "pairnas/pairs.hpp"
#include "pairnas/ranker.hpp"

namespace pairnas {

namespace detail {

inline void check_pairing(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "lists differ in length");
  if (a.size() < 2) throw Error(Errc::InvalidArgument, "need at least 2 items");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw Error(Errc::InvalidArgument, "non-finite value");
}

// Number of tied pairs within runs of equal values of an already sorted range.
template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first;
    std::int64_t n = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++n;
    }
    total += n * (n - 1) / 2;
    first = run;
  }
  return total;
}

// Merge sort counting inversions (swaps needed to sort `v` ascending).
inline std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf,
                                     std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

/// Kendall's tau-b in O(n log n) (Knight's algorithm).
inline double kendall_tau(std::span<const double> predicted, std::span<const double> actual) {
  detail::check_pairing(predicted, actual);
  const std::size_t n = predicted.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (predicted[a] != predicted[b]) return predicted[a] < predicted[b];
    return actual[a] < actual[b];
  });
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t ties_p = detail::tied_pairs(
      order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return predicted[a] == predicted[b]; });
  const std::int64_t ties_joint = detail::tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predicted[a] == predicted[b] && actual[a] == actual[b];
  });
  std::vector<double> seq(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = actual[order[i]];
  const std::int64_t swaps = detail::count_inversions(seq, buf, 0, n);
  const std::int64_t ties_a =
      detail::tied_pairs(seq.begin(), seq.end(), [](double a, double b) { return a == b; });
  if (ties_p == n0 || ties_a == n0)
    throw Error(Errc::DegenerateInput, "all values tied in one list");
  // concordant - discordant = n0 - ties_p - ties_a + ties_joint - 2 * swaps
  const double num = static_cast<double>(n0 - ties_p - ties_a + ties_joint - 2 * swaps);
  const double den = std::sqrt(static_cast<double>(n0 - ties_p)) *
                     std::sqrt(static_cast<double>(n0 - ties_a));
  return std::clamp(num / den, -1.0, 1.0);
}

/// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

inline double spearman_rho(std::span<const double> predicted, std::span<const double> actual) {
  detail::check_pairing(predicted, actual);
  const auto rp = average_ranks(predicted);
  const auto ra = average_ranks(actual);
  const double n = static_cast<double>(rp.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rp.size(); ++i) {
    const double dx = rp[i] - mean, dy = ra[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::DegenerateInput, "all values tied in one list");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double pair_accuracy(const RankerModel& model, std::span<const PairExample> pairs,
                            std::span<const EncodedMatrix> encodings) {
  if (pairs.empty()) throw Error(Errc::EmptyPairSet, "pair_accuracy of no pairs");
  return pair_accuracy_from_scores(score_all(model, encodings), pairs);
}

}  // namespace pairnas

#endif  // PAIRNAS_METRICS_HPP_
