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

#ifndef CVBENCH_CORE_HPP
#define CVBENCH_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

/**
 * @file core.hpp
 * @brief Shared data types, distances, label canonicalization and ranking.
 */

namespace cvbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a validity index has no defined value for a (dataset, partition) pair.
class IndexUndefined : public Error {
 public:
  using Error::Error;
};

using Label = int;
using Labels = std::vector<Label>;

/// Reserved label for unclustered observations. Never counted as a cluster.
inline constexpr Label kNoise = -1;

/// Row-major N x D observation matrix.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Orientation { max, min };

enum class Distribution { uniform, gaussian, logistic };
enum class Compactness { compact, sparse, random };

inline std::string to_string(Orientation o) { return o == Orientation::max ? "max" : "min"; }

inline std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::uniform: return "uniform";
    case Distribution::gaussian: return "gaussian";
    case Distribution::logistic: return "logistic";
  }
  return "?";
}

inline std::string to_string(Compactness c) {
  switch (c) {
    case Compactness::compact: return "compact";
    case Compactness::sparse: return "sparse";
    case Compactness::random: return "random";
  }
  return "?";
}

inline Distribution parse_distribution(const std::string& s) {
  if (s == "uniform") return Distribution::uniform;
  if (s == "gaussian") return Distribution::gaussian;
  if (s == "logistic") return Distribution::logistic;
  throw Error("unknown distribution '" + s + "'");
}

inline Compactness parse_compactness(const std::string& s) {
  if (s == "compact") return Compactness::compact;
  if (s == "sparse") return Compactness::sparse;
  if (s == "random") return Compactness::random;
  throw Error("unknown compactness level '" + s + "'");
}

/// Number of distinct non-noise labels.
inline int count_clusters(std::span<const Label> labels) {
  std::unordered_set<Label> seen;
  for (Label l : labels) {
    if (l != kNoise) seen.insert(l);
  }
  return static_cast<int>(seen.size());
}

inline int count_noise(std::span<const Label> labels) {
  return static_cast<int>(std::count(labels.begin(), labels.end(), kNoise));
}

inline void validate_labels(std::span<const Label> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 && labels[i] != kNoise) {
      throw Error("invalid label " + std::to_string(labels[i]) + " at row " + std::to_string(i));
    }
  }
}

struct GroundTruth {
  Labels labels;
  int k_star = 0;
  double noise_fraction = 0.0;

  static GroundTruth from_labels(Labels labels) {
    validate_labels(labels);
    GroundTruth gt;
    gt.k_star = count_clusters(labels);
    gt.noise_fraction = labels.empty() ? 0.0 : static_cast<double>(count_noise(labels)) / labels.size();
    gt.labels = std::move(labels);
    return gt;
  }
};

struct PropertyTags {
  int k_star = 0;
  int dimensions = 0;
  double overlap = 0.0;
  double imbalance = 0.0;
  bool has_noise = false;
  Compactness compactness = Compactness::random;
  Distribution distribution = Distribution::gaussian;
};

struct Dataset {
  std::string id;
  Matrix points;
  GroundTruth truth;
  PropertyTags meta;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  int dimensions() const { return static_cast<int>(points.cols()); }
};

/// Checks the structural invariants of a dataset; throws Error on violation.
inline void validate(const Dataset& ds) {
  if (ds.points.rows() < 2) throw Error("dataset '" + ds.id + "' needs at least 2 observations");
  if (ds.points.cols() < 1) throw Error("dataset '" + ds.id + "' needs at least 1 dimension");
  if (ds.truth.labels.size() != ds.size()) {
    throw Error("dataset '" + ds.id + "': label count does not match observation count");
  }
  for (Eigen::Index i = 0; i < ds.points.rows(); ++i) {
    if (!ds.points.row(i).allFinite()) {
      throw Error("dataset '" + ds.id + "': non-finite value in row " + std::to_string(i));
    }
  }
}

struct Partition {
  Labels labels;
  int k = 0;
  std::string source;

  static Partition from_labels(Labels labels, std::string source = {}) {
    validate_labels(labels);
    Partition p;
    p.k = count_clusters(labels);
    p.labels = std::move(labels);
    p.source = std::move(source);
    return p;
  }

  std::size_t size() const { return labels.size(); }
  int noise_count() const { return count_noise(labels); }
};

/// Dense symmetric matrix of pairwise Euclidean distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

inline DistanceMatrix compute_distance_matrix(const Matrix& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw Error("distance matrix needs at least 2 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!points.row(static_cast<Eigen::Index>(i)).allFinite()) {
      throw Error("non-finite value in row " + std::to_string(i));
    }
  }
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = points.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      dm.set(i, j, (xi - points.row(static_cast<Eigen::Index>(j))).norm());
    }
  }
  return dm;
}

/// Renames cluster ids in order of first appearance; NOISE is kept as is.
inline Labels canonical_form(std::span<const Label> labels) {
  std::unordered_map<Label, Label> remap;
  Labels out(labels.size());
  Label next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) {
      out[i] = kNoise;
      continue;
    }
    auto [it, inserted] = remap.try_emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

inline Labels canonical_form(const Partition& p) { return canonical_form(p.labels); }

/**
 * @brief Tied ranks with rank 1 for the best value.
 *
 * Best is the largest value under Orientation::max and the smallest under
 * Orientation::min. Tied values share the mean of the ranks they span.
 */
inline std::vector<double> average_ranks(std::span<const double> values, Orientation orientation = Orientation::max) {
  if (values.empty()) throw Error("cannot rank an empty vector");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (orientation == Orientation::max) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  }
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Group membership: row indices of every non-noise cluster, in label order.
struct ClusterIndex {
  std::vector<Label> ids;
  std::vector<std::vector<std::size_t>> members;

  explicit ClusterIndex(std::span<const Label> labels) {
    std::vector<Label> sorted;
    for (Label l : labels) {
      if (l != kNoise) sorted.push_back(l);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    ids = sorted;
    members.resize(ids.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == kNoise) continue;
      const auto pos = std::lower_bound(ids.begin(), ids.end(), labels[i]) - ids.begin();
      members[static_cast<std::size_t>(pos)].push_back(i);
    }
  }

  std::size_t k() const { return ids.size(); }
};

/// SplitMix64 step; used to derive independent seeds from (suite seed, stream id).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0xd1342543de82ef95ULL + 1));
}

/// FNV-1a 64-bit hash; stable across platforms, used for per-dataset seeds and config hashes.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Round half up, tolerant to representation error (0.7 * 5 rounds to 4).
inline long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5 + 1e-9)); }

}  // namespace cvbench

#endif
