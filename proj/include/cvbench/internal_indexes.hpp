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

#ifndef CVBENCH_INTERNAL_INDEXES_HPP
#define CVBENCH_INTERNAL_INDEXES_HPP

#include "cvbench/core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

/**
 * @file internal_indexes.hpp
 * @brief Internal (relative) cluster validity indexes and the noise adjustment.
 *
 * Every index except DBCV is evaluated on the non-noise observations only and
 * then rescaled by the clustered fraction of the data (noise_adjust). DBCV
 * accounts for noise itself by weighting cluster validities with |C| / N.
 */

namespace cvbench {

enum class InternalIndex {
  silhouette,
  vrc,
  db,
  dunn,
  cindex,
  aucc,
  point_biserial,
  pbm,
  wb,
  xie_beni,
  wemmert_gancarski,
  ratkowsky_lance,
  gplus,
  tau,
  dbcv,
};

enum class Approach { sep_comp, density, mixed };

struct IndexDescriptor {
  InternalIndex id;
  const char* name;
  Orientation orientation;
  Approach approach;
  bool requires_coordinates;
};

inline constexpr std::array<IndexDescriptor, 15> kInternalIndexes = {{
    {InternalIndex::silhouette, "silhouette", Orientation::max, Approach::sep_comp, false},
    {InternalIndex::vrc, "vrc", Orientation::max, Approach::sep_comp, true},
    {InternalIndex::db, "db", Orientation::min, Approach::sep_comp, true},
    {InternalIndex::dunn, "dunn", Orientation::max, Approach::sep_comp, false},
    {InternalIndex::cindex, "cindex", Orientation::min, Approach::sep_comp, false},
    {InternalIndex::aucc, "aucc", Orientation::max, Approach::sep_comp, false},
    {InternalIndex::point_biserial, "point_biserial", Orientation::max, Approach::sep_comp, false},
    {InternalIndex::pbm, "pbm", Orientation::max, Approach::sep_comp, true},
    {InternalIndex::wb, "wb", Orientation::min, Approach::sep_comp, true},
    {InternalIndex::xie_beni, "xie_beni", Orientation::min, Approach::sep_comp, true},
    {InternalIndex::wemmert_gancarski, "wemmert_gancarski", Orientation::max, Approach::sep_comp, true},
    {InternalIndex::ratkowsky_lance, "ratkowsky_lance", Orientation::max, Approach::sep_comp, true},
    {InternalIndex::gplus, "gplus", Orientation::min, Approach::sep_comp, false},
    {InternalIndex::tau, "tau", Orientation::max, Approach::sep_comp, false},
    {InternalIndex::dbcv, "dbcv", Orientation::max, Approach::density, false},
}};

inline const IndexDescriptor& descriptor(InternalIndex id) {
  for (const auto& d : kInternalIndexes) {
    if (d.id == id) return d;
  }
  throw Error("unknown internal index");
}

inline std::string to_string(InternalIndex id) { return descriptor(id).name; }

inline InternalIndex parse_internal_index(const std::string& s) {
  for (const auto& d : kInternalIndexes) {
    if (s == d.name) return d.id;
  }
  throw Error("unknown internal index '" + s + "'");
}

inline std::vector<InternalIndex> all_internal_indexes() {
  std::vector<InternalIndex> out;
  for (const auto& d : kInternalIndexes) out.push_back(d.id);
  return out;
}

struct IndexScore {
  InternalIndex id;
  Orientation orientation;
  double raw;
  double adjusted;
};

/**
 * @brief Rescale an index value by the clustered fraction (N - N_noise) / N.
 *
 * The rescaling is skipped for negative values of maximisation indexes and
 * for positive values of minimisation indexes, where it would reward rather
 * than penalise unclustered data.
 */
inline double noise_adjust(double raw, Orientation orientation, std::size_t n, std::size_t n_noise) {
  if (n_noise >= n) throw Error("noise_adjust: every observation is noise");
  if (n_noise == 0) return raw;
  if (orientation == Orientation::max && raw < 0) return raw;
  if (orientation == Orientation::min && raw > 0) return raw;
  return raw * static_cast<double>(n - n_noise) / static_cast<double>(n);
}

/// Pair-level statistics over non-noise observations.
struct PairStatistics {
  double s_plus = 0;   ///< (within, between) pairs with within distance strictly smaller
  double s_minus = 0;  ///< (within, between) pairs with within distance strictly larger
  double n_w = 0;
  double n_b = 0;
  double sum_within = 0;
  double sum_between = 0;
  double max_within = 0;
  double min_between = std::numeric_limits<double>::infinity();
  double sum_all = 0;
  double sumsq_all = 0;
  double smallest_nw_sum = 0;  ///< sum of the n_w smallest distances overall
  double largest_nw_sum = 0;   ///< sum of the n_w largest distances overall

  double n_total() const { return n_w + n_b; }
};

/// Every unordered point pair, sorted by ascending distance (stable in (i, j) order).
class SortedPairs {
 public:
  SortedPairs() = default;
  explicit SortedPairs(const DistanceMatrix& dist) {
    const std::size_t n = dist.size();
    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<std::uint32_t> pi(pairs), pj(pairs), order(pairs);
    std::vector<double> d(pairs);
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        pi[p] = static_cast<std::uint32_t>(i);
        pj[p] = static_cast<std::uint32_t>(j);
        d[p] = dist(i, j);
      }
    }
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });
    first_.resize(pairs);
    second_.resize(pairs);
    dist_.resize(pairs);
    for (std::size_t q = 0; q < pairs; ++q) {
      first_[q] = pi[order[q]];
      second_[q] = pj[order[q]];
      dist_[q] = d[order[q]];
    }
  }

  std::size_t size() const { return dist_.size(); }
  std::uint32_t first(std::size_t q) const { return first_[q]; }
  std::uint32_t second(std::size_t q) const { return second_[q]; }
  double distance(std::size_t q) const { return dist_[q]; }

 private:
  std::vector<std::uint32_t> first_, second_;
  std::vector<double> dist_;
};

/**
 * @brief Per-dataset state shared by every partition evaluated on it.
 *
 * Holds the distance matrix, all point pairs sorted by distance, and
 * log-distances (DBCV core distances are computed in log space so they stay
 * finite in high dimension).
 */
class IndexContext {
 public:
  explicit IndexContext(Matrix points)
      : points_(std::move(points)), dist_(compute_distance_matrix(points_)), pairs_(dist_) {
    const std::size_t n = dist_.size();
    log_dist_.assign(n * n, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && dist_(i, j) > 0) log_dist_[i * n + j] = std::log(dist_(i, j));
      }
    }
  }

  const Matrix& points() const { return points_; }
  const DistanceMatrix& distances() const { return dist_; }
  const SortedPairs& sorted_pairs() const { return pairs_; }
  std::size_t size() const { return dist_.size(); }
  int dimensions() const { return static_cast<int>(points_.cols()); }
  double log_distance(std::size_t i, std::size_t j) const { return log_dist_[i * size() + j]; }

 private:
  Matrix points_;
  DistanceMatrix dist_;
  SortedPairs pairs_;
  std::vector<double> log_dist_;
};

namespace detail {

inline void require_valid_k(const ClusterIndex& ci, std::size_t n_clustered) {
  if (ci.k() < 2) throw IndexUndefined("index undefined for fewer than 2 clusters");
  if (ci.k() >= n_clustered) throw IndexUndefined("index undefined when every observation is a singleton");
}

/// Single pass over the sorted pair list; tied distances are processed as one group.
inline PairStatistics pair_walk(const SortedPairs& pairs, std::span<const Label> labels) {
  PairStatistics st;
  std::vector<double> valid;
  valid.reserve(pairs.size());
  double w_less = 0, b_less = 0;
  std::size_t q = 0;
  const std::size_t total = pairs.size();
  while (q < total) {
    const double d = pairs.distance(q);
    double w = 0, b = 0;
    std::size_t r = q;
    for (; r < total && pairs.distance(r) == d; ++r) {
      const Label a = labels[pairs.first(r)];
      const Label c = labels[pairs.second(r)];
      if (a == kNoise || c == kNoise) continue;
      valid.push_back(d);
      (a == c ? w : b) += 1;
    }
    st.s_minus += w * b_less;
    st.s_plus += b * w_less;
    st.n_w += w;
    st.n_b += b;
    st.sum_within += w * d;
    st.sum_between += b * d;
    st.sum_all += (w + b) * d;
    st.sumsq_all += (w + b) * d * d;
    if (w > 0) st.max_within = std::max(st.max_within, d);
    if (b > 0) st.min_between = std::min(st.min_between, d);
    w_less += w;
    b_less += b;
    q = r;
  }
  const auto nw = static_cast<std::size_t>(st.n_w);
  for (std::size_t t = 0; t < nw; ++t) {
    st.smallest_nw_sum += valid[t];
    st.largest_nw_sum += valid[valid.size() - 1 - t];
  }
  return st;
}

}  // namespace detail

inline PairStatistics pair_statistics(const IndexContext& ctx, const Partition& partition) {
  if (ClusterIndex(partition.labels).k() < 2) throw IndexUndefined("pair statistics need at least 2 clusters");
  return detail::pair_walk(ctx.sorted_pairs(), partition.labels);
}

inline PairStatistics pair_statistics(const DistanceMatrix& dist, const Partition& partition) {
  if (ClusterIndex(partition.labels).k() < 2) throw IndexUndefined("pair statistics need at least 2 clusters");
  return detail::pair_walk(SortedPairs(dist), partition.labels);
}

/**
 * @brief Mean silhouette width over non-noise observations.
 *
 * Singleton clusters contribute 0, and 0/0 is taken as 0.
 */
inline double silhouette(const DistanceMatrix& dist, std::span<const Label> labels) {
  const ClusterIndex ci(labels);
  if (ci.k() < 2) throw IndexUndefined("silhouette needs at least 2 clusters");
  std::vector<int> slot(labels.size(), -1);
  for (std::size_t c = 0; c < ci.k(); ++c) {
    for (auto i : ci.members[c]) slot[i] = static_cast<int>(c);
  }
  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> sums(ci.k());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (slot[i] < 0) continue;
    ++count;
    const auto own = static_cast<std::size_t>(slot[i]);
    if (ci.members[own].size() == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    const auto row = dist.row(i);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (slot[j] >= 0) sums[static_cast<std::size_t>(slot[j])] += row[j];
    }
    const double a = sums[own] / static_cast<double>(ci.members[own].size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < ci.k(); ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(ci.members[c].size()));
    }
    const double m = std::max(a, b);
    if (m > 0) total += (b - a) / m;
  }
  return total / static_cast<double>(count);
}

/**
 * @brief Area under the ROC curve of "same cluster" against pair proximity.
 *
 * Within-cluster pairs are positives and the score is the negated distance.
 * Thresholds sweep distinct distance values; tied groups are joined with a
 * straight segment (trapezoid rule).
 */
inline double aucc(const SortedPairs& pairs, std::span<const Label> labels) {
  const ClusterIndex ci(labels);
  if (ci.k() < 2) throw IndexUndefined("AUCC needs at least 2 clusters");
  double positives = 0, negatives = 0;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const Label a = labels[pairs.first(q)], b = labels[pairs.second(q)];
    if (a == kNoise || b == kNoise) continue;
    (a == b ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) throw IndexUndefined("AUCC needs within and between pairs");
  double tpr_prev = 0, fpr_prev = 0, tp = 0, fp = 0, area = 0;
  std::size_t q = 0;
  while (q < pairs.size()) {
    const double d = pairs.distance(q);
    for (; q < pairs.size() && pairs.distance(q) == d; ++q) {
      const Label a = labels[pairs.first(q)], b = labels[pairs.second(q)];
      if (a == kNoise || b == kNoise) continue;
      (a == b ? tp : fp) += 1;
    }
    const double tpr = tp / positives, fpr = fp / negatives;
    area += (fpr - fpr_prev) * (tpr + tpr_prev) / 2.0;
    tpr_prev = tpr;
    fpr_prev = fpr;
  }
  return area;
}

namespace detail {

/// Coordinates-based summaries of a partition restricted to non-noise rows.
struct Geometry {
  ClusterIndex clusters;
  std::vector<Vector> centroids;
  Vector grand;
  std::size_t n = 0;

  Geometry(const Matrix& x, std::span<const Label> labels) : clusters(labels) {
    const auto dims = x.cols();
    grand = Vector::Zero(dims);
    for (const auto& mem : clusters.members) {
      Vector c = Vector::Zero(dims);
      for (auto i : mem) c += x.row(static_cast<Eigen::Index>(i)).transpose();
      grand += c;
      n += mem.size();
      centroids.push_back(c / static_cast<double>(mem.size()));
    }
    grand /= static_cast<double>(n);
  }

  std::size_t k() const { return clusters.k(); }

  double within_ss(const Matrix& x) const {
    double w = 0;
    for (std::size_t c = 0; c < k(); ++c) {
      for (auto i : clusters.members[c]) w += (x.row(static_cast<Eigen::Index>(i)).transpose() - centroids[c]).squaredNorm();
    }
    return w;
  }

  double between_ss() const {
    double b = 0;
    for (std::size_t c = 0; c < k(); ++c) b += static_cast<double>(clusters.members[c].size()) * (centroids[c] - grand).squaredNorm();
    return b;
  }
};

inline double vrc(const Matrix& x, const Geometry& g) {
  const double w = g.within_ss(x), b = g.between_ss();
  if (w == 0) throw IndexUndefined("VRC undefined: zero within-cluster scatter");
  const double k = static_cast<double>(g.k()), n = static_cast<double>(g.n);
  return (b / (k - 1.0)) / (w / (n - k));
}

inline double davies_bouldin(const Matrix& x, const Geometry& g) {
  std::vector<double> s(g.k(), 0.0);
  for (std::size_t c = 0; c < g.k(); ++c) {
    for (auto i : g.clusters.members[c]) s[c] += (x.row(static_cast<Eigen::Index>(i)).transpose() - g.centroids[c]).norm();
    s[c] /= static_cast<double>(g.clusters.members[c].size());
  }
  double total = 0;
  for (std::size_t i = 0; i < g.k(); ++i) {
    double worst = 0;
    for (std::size_t j = 0; j < g.k(); ++j) {
      if (i == j) continue;
      const double m = (g.centroids[i] - g.centroids[j]).norm();
      if (m == 0) throw IndexUndefined("DB undefined: coincident centroids");
      worst = std::max(worst, (s[i] + s[j]) / m);
    }
    total += worst;
  }
  return total / static_cast<double>(g.k());
}

inline double pbm(const Matrix& x, const Geometry& g) {
  double e1 = 0, ek = 0, dk = 0;
  for (std::size_t c = 0; c < g.k(); ++c) {
    for (auto i : g.clusters.members[c]) {
      const auto xi = x.row(static_cast<Eigen::Index>(i)).transpose();
      e1 += (xi - g.grand).norm();
      ek += (xi - g.centroids[c]).norm();
    }
    for (std::size_t d = c + 1; d < g.k(); ++d) dk = std::max(dk, (g.centroids[c] - g.centroids[d]).norm());
  }
  if (ek == 0) throw IndexUndefined("PBM undefined: zero within-cluster dispersion");
  const double v = (1.0 / static_cast<double>(g.k())) * (e1 / ek) * dk;
  return v * v;
}

inline double wb(const Matrix& x, const Geometry& g) {
  const double b = g.between_ss();
  if (b == 0) throw IndexUndefined("WB undefined: zero between-cluster scatter");
  return static_cast<double>(g.k()) * g.within_ss(x) / b;
}

inline double xie_beni(const Matrix& x, const Geometry& g) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.k(); ++i) {
    for (std::size_t j = i + 1; j < g.k(); ++j) sep = std::min(sep, (g.centroids[i] - g.centroids[j]).squaredNorm());
  }
  if (sep == 0) throw IndexUndefined("Xie-Beni undefined: coincident centroids");
  return g.within_ss(x) / (static_cast<double>(g.n) * sep);
}

inline double wemmert_gancarski(const Matrix& x, const Geometry& g) {
  double total = 0;
  for (std::size_t c = 0; c < g.k(); ++c) {
    double ratio_sum = 0;
    for (auto i : g.clusters.members[c]) {
      const auto xi = x.row(static_cast<Eigen::Index>(i)).transpose();
      const double own = (xi - g.centroids[c]).norm();
      double other = std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < g.k(); ++d) {
        if (d != c) other = std::min(other, (xi - g.centroids[d]).norm());
      }
      ratio_sum += other == 0 ? (own == 0 ? 1.0 : std::numeric_limits<double>::infinity()) : own / other;
    }
    total += std::max(0.0, static_cast<double>(g.clusters.members[c].size()) - ratio_sum);
  }
  return total / static_cast<double>(g.n);
}

inline double ratkowsky_lance(const Matrix& x, const Geometry& g) {
  double mean_root = 0;
  int used = 0;
  for (Eigen::Index a = 0; a < x.cols(); ++a) {
    double tss = 0, bss = 0;
    for (std::size_t c = 0; c < g.k(); ++c) {
      for (auto i : g.clusters.members[c]) {
        const double v = x(static_cast<Eigen::Index>(i), a) - g.grand(a);
        tss += v * v;
      }
      const double dc = g.centroids[c](a) - g.grand(a);
      bss += static_cast<double>(g.clusters.members[c].size()) * dc * dc;
    }
    if (tss <= 0) continue;
    mean_root += std::sqrt(std::min(1.0, bss / tss));
    ++used;
  }
  if (used == 0) throw IndexUndefined("Ratkowsky-Lance undefined: constant attributes");
  return (mean_root / used) / std::sqrt(static_cast<double>(g.k()));
}

}  // namespace detail

/**
 * @brief Density Based Clustering Validation over all-points core distances.
 *
 * Core distance of x in cluster C: (sum_{y in C, y != x} (1/d(x,y))^D / (|C|-1))^(-1/D).
 * Mutual reachability MSTs give the density sparseness of each cluster (largest
 * edge between internal MST nodes) and the density separation between
 * clusters (smallest mutual reachability between internal nodes). The score
 * is sum_C |C|/N * (sep - sparse) / max(sep, sparse) with N counting noise.
 * Equal mutual reachability weights are ordered by row indices.
 */
inline double dbcv(const IndexContext& ctx, std::span<const Label> labels) {
  const ClusterIndex ci(labels);
  if (ci.k() < 2) throw IndexUndefined("DBCV needs at least 2 clusters");
  const std::size_t n = labels.size();
  const double dims = static_cast<double>(ctx.dimensions());
  const auto& dist = ctx.distances();

  std::vector<double> core(n, 0.0);
  std::vector<double> terms;
  for (const auto& mem : ci.members) {
    if (mem.size() < 2) continue;
    for (auto i : mem) {
      terms.clear();
      bool coincident = false;
      for (auto j : mem) {
        if (i == j) continue;
        const double ld = ctx.log_distance(i, j);
        if (std::isinf(ld)) {
          coincident = true;
          break;
        }
        terms.push_back(-dims * ld);
      }
      if (coincident) {
        core[i] = 0.0;
        continue;
      }
      const double mx = *std::max_element(terms.begin(), terms.end());
      double s = 0;
      for (double t : terms) s += std::exp(t - mx);
      const double log_mean = mx + std::log(s / static_cast<double>(mem.size() - 1));
      core[i] = std::exp(-log_mean / dims);
    }
  }
  auto mreach = [&](std::size_t a, std::size_t b) { return std::max({core[a], core[b], dist(a, b)}); };

  std::vector<double> sparseness(ci.k(), 0.0);
  std::vector<std::vector<std::size_t>> internal(ci.k());
  for (std::size_t c = 0; c < ci.k(); ++c) {
    const auto& mem = ci.members[c];
    const std::size_t m = mem.size();
    if (m == 1) {
      internal[c] = mem;
      continue;
    }
    // Prim's algorithm on the dense mutual reachability graph. Edges are
    // ordered by (weight, lower row, higher row) so the tree is unique.
    using EdgeKey = std::tuple<double, std::size_t, std::size_t>;
    const EdgeKey none{std::numeric_limits<double>::infinity(), 0, 0};
    std::vector<EdgeKey> best(m, none);
    std::vector<std::size_t> parent(m, 0);
    std::vector<bool> in_tree(m, false);
    std::vector<int> degree(m, 0);
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    best[0] = EdgeKey{0.0, 0, 0};
    for (std::size_t step = 0; step < m; ++step) {
      std::size_t u = m;
      for (std::size_t v = 0; v < m; ++v) {
        if (!in_tree[v] && (u == m || best[v] < best[u])) u = v;
      }
      in_tree[u] = true;
      if (step > 0) {
        edges.emplace_back(parent[u], u, std::get<0>(best[u]));
        ++degree[parent[u]];
        ++degree[u];
      }
      for (std::size_t v = 0; v < m; ++v) {
        if (in_tree[v]) continue;
        const EdgeKey key{mreach(mem[u], mem[v]), std::min(u, v), std::max(u, v)};
        if (key < best[v]) {
          best[v] = key;
          parent[v] = u;
        }
      }
    }
    for (std::size_t v = 0; v < m; ++v) {
      if (degree[v] > 1) internal[c].push_back(mem[v]);
    }
    double dsc = 0;
    bool any_internal_edge = false;
    for (const auto& [a, b, w] : edges) {
      if (degree[a] > 1 && degree[b] > 1) {
        dsc = std::max(dsc, w);
        any_internal_edge = true;
      }
    }
    if (!any_internal_edge) {
      for (const auto& e : edges) dsc = std::max(dsc, std::get<2>(e));
    }
    if (internal[c].empty()) internal[c] = mem;
    sparseness[c] = dsc;
  }

  double score = 0;
  for (std::size_t c = 0; c < ci.k(); ++c) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < ci.k(); ++o) {
      if (o == c) continue;
      for (auto a : internal[c]) {
        for (auto b : internal[o]) sep = std::min(sep, mreach(a, b));
      }
    }
    const double denom = std::max(sep, sparseness[c]);
    const double validity = denom > 0 ? (sep - sparseness[c]) / denom : 0.0;
    score += static_cast<double>(ci.members[c].size()) / static_cast<double>(n) * validity;
  }
  return score;
}

/**
 * @brief Evaluates indexes on one partition, sharing intermediate results.
 *
 * Pair statistics, silhouette sums and centroid geometry are computed at most
 * once per partition regardless of how many indexes are requested. The
 * context must outlive the evaluator; the labels are copied.
 */
class PartitionEvaluator {
 public:
  PartitionEvaluator(const IndexContext& ctx, const Partition& partition) : ctx_(ctx), labels_(partition.labels) {
    if (labels_.size() != ctx.size()) throw Error("partition length does not match dataset");
    n_noise_ = static_cast<std::size_t>(count_noise(labels_));
    clusters_.emplace(labels_);
  }
  PartitionEvaluator(const IndexContext&&, const Partition&) = delete;

  /// Raw index value; throws IndexUndefined when the index has no value here.
  double raw(InternalIndex id) {
    if (id == InternalIndex::dbcv) return dbcv(ctx_, labels_);
    detail::require_valid_k(*clusters_, labels_.size() - n_noise_);
    switch (id) {
      case InternalIndex::silhouette: return silhouette(ctx_.distances(), labels_);
      case InternalIndex::aucc: return aucc(ctx_.sorted_pairs(), labels_);
      case InternalIndex::vrc: return detail::vrc(ctx_.points(), geometry());
      case InternalIndex::db: return detail::davies_bouldin(ctx_.points(), geometry());
      case InternalIndex::pbm: return detail::pbm(ctx_.points(), geometry());
      case InternalIndex::wb: return detail::wb(ctx_.points(), geometry());
      case InternalIndex::xie_beni: return detail::xie_beni(ctx_.points(), geometry());
      case InternalIndex::wemmert_gancarski: return detail::wemmert_gancarski(ctx_.points(), geometry());
      case InternalIndex::ratkowsky_lance: return detail::ratkowsky_lance(ctx_.points(), geometry());
      default: break;
    }
    const auto& st = pairs();
    const double nt = st.n_total();
    switch (id) {
      case InternalIndex::dunn:
        if (st.max_within == 0) throw IndexUndefined("Dunn undefined: zero cluster diameters");
        return st.min_between / st.max_within;
      case InternalIndex::cindex: {
        const double span = st.largest_nw_sum - st.smallest_nw_sum;
        if (span == 0) throw IndexUndefined("C-index undefined: constant distances");
        return (st.sum_within - st.smallest_nw_sum) / span;
      }
      case InternalIndex::point_biserial: {
        const double mean = st.sum_all / nt;
        const double var = st.sumsq_all / nt - mean * mean;
        if (var <= 0 || st.n_w == 0) throw IndexUndefined("point-biserial undefined: constant distances");
        return (st.sum_between / st.n_b - st.sum_within / st.n_w) * std::sqrt(st.n_w * st.n_b / (nt * nt)) / std::sqrt(var);
      }
      case InternalIndex::gplus:
        return 2.0 * st.s_minus / (nt * (nt - 1.0));
      case InternalIndex::tau:
        if (st.n_w == 0) throw IndexUndefined("Tau undefined: no within-cluster pairs");
        return (st.s_plus - st.s_minus) / std::sqrt(st.n_b * st.n_w * (nt * (nt - 1.0) / 2.0));
      default: break;
    }
    throw Error("unhandled internal index");
  }

  IndexScore score(InternalIndex id) {
    const auto& d = descriptor(id);
    const double r = raw(id);
    const double adjusted = id == InternalIndex::dbcv ? r : noise_adjust(r, d.orientation, labels_.size(), n_noise_);
    return {id, d.orientation, r, adjusted};
  }

  /// Like score(), but an undefined index yields nullopt instead of throwing.
  std::optional<IndexScore> try_score(InternalIndex id) {
    try {
      return score(id);
    } catch (const IndexUndefined&) {
      return std::nullopt;
    }
  }

 private:
  const detail::Geometry& geometry() {
    if (!geometry_) geometry_.emplace(ctx_.points(), labels_);
    return *geometry_;
  }
  const PairStatistics& pairs() {
    if (!pairs_) pairs_ = detail::pair_walk(ctx_.sorted_pairs(), labels_);
    return *pairs_;
  }

  const IndexContext& ctx_;
  Labels labels_;
  std::size_t n_noise_ = 0;
  std::optional<ClusterIndex> clusters_;
  std::optional<detail::Geometry> geometry_;
  std::optional<PairStatistics> pairs_;
};

/// One index on one partition; throws IndexUndefined when undefined.
inline IndexScore compute_internal(InternalIndex id, const IndexContext& ctx, const Partition& partition) {
  PartitionEvaluator ev(ctx, partition);
  return ev.score(id);
}

inline IndexScore compute_internal(InternalIndex id, const Dataset& dataset, const Partition& partition) {
  const IndexContext ctx(dataset.points);
  return compute_internal(id, ctx, partition);
}

}  // namespace cvbench

#endif
