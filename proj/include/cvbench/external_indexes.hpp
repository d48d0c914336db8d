/*
 * Copyright (c) 2026, the cvbench authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CVBENCH_EXTERNAL_INDEXES_HPP
#define CVBENCH_EXTERNAL_INDEXES_HPP

#include "cvbench/core.hpp"

#include <array>
#include <algorithm>
#include <unordered_map>
#include <cmath>
#include <span>
#include <string>
#include <vector>

/**
 * @file external_indexes.hpp
 * @brief Partition-vs-ground-truth similarity and the aggregated reference ranking.
 *
 * Noise convention: an observation labelled NOISE on both sides is left out
 * of every count. Any other NOISE label is treated as its own singleton
 * cluster.
 */

namespace cvbench {

enum class ExternalIndex { jaccard, ss3, ari, nmi, nid };

inline constexpr std::array<ExternalIndex, 5> kExternalIndexes = {
    ExternalIndex::jaccard, ExternalIndex::ss3, ExternalIndex::ari, ExternalIndex::nmi, ExternalIndex::nid};

inline std::string to_string(ExternalIndex e) {
  switch (e) {
    case ExternalIndex::jaccard: return "jaccard";
    case ExternalIndex::ss3: return "ss3";
    case ExternalIndex::ari: return "ari";
    case ExternalIndex::nmi: return "nmi";
    case ExternalIndex::nid: return "nid";
  }
  return "?";
}

inline ExternalIndex parse_external_index(const std::string& s) {
  for (auto e : kExternalIndexes) {
    if (to_string(e) == s) return e;
  }
  throw Error("unknown external index '" + s + "'");
}

/// NID is a distance; every other external index is a similarity.
inline Orientation orientation(ExternalIndex e) { return e == ExternalIndex::nid ? Orientation::min : Orientation::max; }

struct PairCounts {
  double n11 = 0;  ///< together in both
  double n10 = 0;  ///< together in the truth only
  double n01 = 0;  ///< together in the partition only
  double n00 = 0;  ///< apart in both

  double total() const { return n11 + n10 + n01 + n00; }
};

struct ContingencyTable {
  std::vector<std::vector<double>> counts;  ///< rows: truth clusters, cols: partition clusters
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  double n = 0;
};

namespace detail {

/// Dense 0..m-1 ids after the pairwise noise convention; rows dropped when both sides are NOISE.
inline std::pair<std::vector<int>, std::vector<int>> comparable_ids(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw Error("label length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  auto densify = [](std::span<const Label> labels, const std::vector<bool>& keep) {
    std::unordered_map<Label, int> ids;
    std::vector<int> out;
    int next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!keep[i]) continue;
      if (labels[i] == kNoise) {
        out.push_back(next++);
        continue;
      }
      auto [it, inserted] = ids.try_emplace(labels[i], next);
      if (inserted) ++next;
      out.push_back(it->second);
    }
    return out;
  };
  std::vector<bool> keep(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) keep[i] = !(a[i] == kNoise && b[i] == kNoise);
  return {densify(a, keep), densify(b, keep)};
}

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace detail

inline ContingencyTable contingency_table(std::span<const Label> truth, std::span<const Label> partition) {
  const auto [a, b] = detail::comparable_ids(truth, partition);
  ContingencyTable t;
  const int ka = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
  const int kb = b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1;
  t.counts.assign(static_cast<std::size_t>(ka), std::vector<double>(static_cast<std::size_t>(kb), 0.0));
  t.row_sums.assign(static_cast<std::size_t>(ka), 0.0);
  t.col_sums.assign(static_cast<std::size_t>(kb), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.counts[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1.0;
    t.row_sums[static_cast<std::size_t>(a[i])] += 1.0;
    t.col_sums[static_cast<std::size_t>(b[i])] += 1.0;
  }
  t.n = static_cast<double>(a.size());
  return t;
}

inline PairCounts pair_counts(const ContingencyTable& t) {
  double both = 0, rows = 0, cols = 0;
  for (const auto& r : t.counts) {
    for (double c : r) both += detail::choose2(c);
  }
  for (double r : t.row_sums) rows += detail::choose2(r);
  for (double c : t.col_sums) cols += detail::choose2(c);
  PairCounts pc;
  pc.n11 = both;
  pc.n10 = rows - both;
  pc.n01 = cols - both;
  pc.n00 = detail::choose2(t.n) - rows - cols + both;
  return pc;
}

inline PairCounts pair_counts(std::span<const Label> truth, std::span<const Label> partition) {
  return pair_counts(contingency_table(truth, partition));
}

namespace detail {

inline double entropy(std::span<const double> sums, double n) {
  double h = 0.0;
  for (double s : sums) {
    if (s > 0) h -= (s / n) * std::log(s / n);
  }
  return h;
}

inline double mutual_information(const ContingencyTable& t) {
  double mi = 0.0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      const double c = t.counts[i][j];
      if (c > 0) mi += (c / t.n) * std::log(c * t.n / (t.row_sums[i] * t.col_sums[j]));
    }
  }
  return std::max(0.0, mi);
}

inline bool identical(const PairCounts& pc) { return pc.n10 == 0 && pc.n01 == 0; }

}  // namespace detail

/**
 * @brief Score of `partition` against `truth` under one external index.
 *
 * Jaccard, SS3 (Sokal-Sneath's third coefficient), ARI and NMI are
 * similarities in which 1 means identical partitions. NID is the normalised
 * information distance, 0 for identical partitions.
 */
inline double external_score(ExternalIndex index, const ContingencyTable& t) {
  const PairCounts pc = pair_counts(t);
  switch (index) {
    case ExternalIndex::jaccard: {
      const double denom = pc.n11 + pc.n10 + pc.n01;
      return denom == 0 ? 1.0 : pc.n11 / denom;
    }
    case ExternalIndex::ss3: {
      const double denom = std::sqrt((pc.n11 + pc.n10) * (pc.n11 + pc.n01) * (pc.n00 + pc.n10) * (pc.n00 + pc.n01));
      if (denom == 0) return detail::identical(pc) ? 1.0 : 0.0;
      return pc.n11 * pc.n00 / denom;
    }
    case ExternalIndex::ari: {
      const double total = pc.total();
      const double a = pc.n11 + pc.n10, b = pc.n11 + pc.n01;
      const double expected = total == 0 ? 0.0 : a * b / total;
      const double maximum = 0.5 * (a + b);
      if (maximum == expected) return detail::identical(pc) ? 1.0 : 0.0;
      return (pc.n11 - expected) / (maximum - expected);
    }
    case ExternalIndex::nmi: {
      const double ha = detail::entropy(t.row_sums, t.n);
      const double hb = detail::entropy(t.col_sums, t.n);
      if (ha == 0.0 || hb == 0.0) return (ha == 0.0 && hb == 0.0) ? 1.0 : 0.0;
      return std::clamp(detail::mutual_information(t) / std::sqrt(ha * hb), 0.0, 1.0);
    }
    case ExternalIndex::nid: {
      const double ha = detail::entropy(t.row_sums, t.n);
      const double hb = detail::entropy(t.col_sums, t.n);
      const double hmax = std::max(ha, hb);
      if (hmax == 0.0) return 0.0;
      return std::clamp(1.0 - detail::mutual_information(t) / hmax, 0.0, 1.0);
    }
  }
  return 0.0;
}

inline double external_score(ExternalIndex index, std::span<const Label> truth, std::span<const Label> partition) {
  return external_score(index, contingency_table(truth, partition));
}

using ExternalScores = std::array<double, kExternalIndexes.size()>;

inline ExternalScores external_scores(std::span<const Label> truth, std::span<const Label> partition) {
  const auto t = contingency_table(truth, partition);
  ExternalScores out{};
  for (std::size_t i = 0; i < kExternalIndexes.size(); ++i) out[i] = external_score(kExternalIndexes[i], t);
  return out;
}

/**
 * @brief Aggregated reference ranking of a partition collection.
 *
 * Each index column is converted to tied ranks (best = 1), the ranks are
 * summed per partition and the sums are ranked again, smallest sum first.
 */
inline std::vector<double> aggregate_external_ranks(std::span<const ExternalScores> scores) {
  if (scores.size() < 2) throw Error("aggregate ranking needs at least 2 partitions");
  std::vector<double> summed(scores.size(), 0.0);
  std::vector<double> column(scores.size());
  for (std::size_t e = 0; e < kExternalIndexes.size(); ++e) {
    for (std::size_t p = 0; p < scores.size(); ++p) column[p] = scores[p][e];
    const auto r = average_ranks(column, orientation(kExternalIndexes[e]));
    for (std::size_t p = 0; p < scores.size(); ++p) summed[p] += r[p];
  }
  return average_ranks(summed, Orientation::min);
}

}  // namespace cvbench

#endif
