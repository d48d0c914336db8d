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

#ifndef CVBENCH_CLUSTERING_HPP
#define CVBENCH_CLUSTERING_HPP

#include "cvbench/core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

/**
 * @file clustering.hpp
 * @brief Candidate partition producers: K-Means and linkage-based hierarchical clustering.
 */

namespace cvbench {

enum class Algorithm { kmeans, single, average, complete, ward };
enum class Linkage { single, average, complete, ward };

inline constexpr std::array<Algorithm, 5> kAlgorithms = {Algorithm::kmeans, Algorithm::single, Algorithm::average,
                                                         Algorithm::complete, Algorithm::ward};

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kmeans: return "kmeans";
    case Algorithm::single: return "single";
    case Algorithm::average: return "average";
    case Algorithm::complete: return "complete";
    case Algorithm::ward: return "ward";
  }
  return "?";
}

inline std::string to_string(Linkage l) {
  switch (l) {
    case Linkage::single: return "single";
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::ward: return "ward";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (auto a : kAlgorithms) {
    if (to_string(a) == s) return a;
  }
  throw Error("unknown algorithm '" + s + "'");
}

inline Linkage linkage_of(Algorithm a) {
  switch (a) {
    case Algorithm::single: return Linkage::single;
    case Algorithm::average: return Linkage::average;
    case Algorithm::complete: return Linkage::complete;
    case Algorithm::ward: return Linkage::ward;
    case Algorithm::kmeans: break;
  }
  throw Error("kmeans has no linkage");
}

/// Upper end of the k sweep: ceil(max(25, 1.75 k*)).
inline int compute_k_max(int k_star) {
  if (k_star < 1) throw Error("k* must be positive");
  return std::max(25, (7 * k_star + 3) / 4);
}

// ---------------------------------------------------------------------------
// K-Means

struct KMeansResult {
  Partition partition;
  Matrix centers;
  double objective = 0.0;              ///< within-cluster sum of squares
  std::vector<double> objective_trace;  ///< WCSS after each assignment step
  int iterations = 0;
};

inline constexpr int kKMeansMaxIterations = 300;

namespace detail {

inline Matrix kmeanspp_seed(const Matrix& x, int k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - centers.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index chosen = 0;
    if (total <= 0) {
      chosen = pick(rng);
    } else {
      const double target = unit(rng) * total;
      double acc = 0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > target && d2[static_cast<std::size_t>(i)] > 0) {
          chosen = i;
          break;
        }
      }
    }
    centers.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

}  // namespace detail

/**
 * @brief Lloyd's algorithm from k-means++ seeding.
 *
 * Runs until the assignment no longer changes or 300 iterations. A cluster
 * that becomes empty receives the point farthest from its current centroid.
 * Deterministic for a given seed.
 */
inline KMeansResult run_kmeans(const Matrix& x, int k, std::uint64_t seed) {
  const auto n = x.rows();
  if (k < 1 || k > n) throw Error("kmeans: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centers = detail::kmeanspp_seed(x, k, rng);

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<double> own_d2(static_cast<std::size_t>(n), 0.0);
  for (int it = 0; it < kKMeansMaxIterations; ++it) {
    bool changed = false;
    double wcss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - res.centers.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) changed = true;
      assign[static_cast<std::size_t>(i)] = best;
      own_d2[static_cast<std::size_t>(i)] = bd;
      wcss += bd;
    }
    res.iterations = it + 1;

    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || own_d2[static_cast<std::size_t>(i)] > own_d2[static_cast<std::size_t>(far)]) far = i;
      }
      --sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      ++sizes[static_cast<std::size_t>(c)];
      wcss -= own_d2[static_cast<std::size_t>(far)];
      own_d2[static_cast<std::size_t>(far)] = 0;
      changed = true;
    }
    res.objective_trace.push_back(wcss);

    res.centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) res.centers.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) res.centers.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    if (!changed) break;
  }
  res.objective = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    res.objective += (x.row(i) - res.centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
  }
  res.partition = Partition::from_labels(canonical_form(assign), "kmeans");
  return res;
}

/// Best of `restarts` K-Means runs by objective, with seeds derived from `seed`.
inline KMeansResult run_kmeans_restarts(const Matrix& x, int k, std::uint64_t seed, int restarts) {
  KMeansResult best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto res = run_kmeans(x, k, restarts <= 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(r)));
    if (r == 0 || res.objective < best.objective) best = std::move(res);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Agglomerative clustering

struct Merge {
  int a;          ///< node id: leaves are 0..n-1, merge t creates node n + t
  int b;
  double height;  ///< linkage distance (Ward: sqrt of the squared-scale criterion)
  int size;
};

struct Dendrogram {
  int n = 0;
  Linkage linkage = Linkage::single;
  std::vector<Merge> merges;
};

/**
 * @brief Agglomerative clustering with Lance-Williams updates.
 *
 * Among equal linkage distances the merge with the lowest (i, j) pair is
 * taken, where a cluster is identified by its lowest member index. Ward runs
 * on squared Euclidean distances and reports square-rooted heights.
 */
inline Dendrogram run_agglomerative(const DistanceMatrix& dist, Linkage linkage) {
  const std::size_t n = dist.size();
  if (n < 2) throw Error("agglomerative clustering needs at least 2 points");
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist(i, j);
      d[i * n + j] = linkage == Linkage::ward ? v * v : v;
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };

  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1), node(n);
  std::iota(node.begin(), node.end(), 0);
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> nn(n, none);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto rescan = [&](std::size_t i) {
    nn[i] = none;
    nnd[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && at(i, j) < nnd[i]) {
        nnd[i] = at(i, j);
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  Dendrogram dg;
  dg.n = static_cast<int>(n);
  dg.linkage = linkage;
  dg.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = none;
    for (std::size_t r = 0; r < n; ++r) {
      if (active[r] && nn[r] != none && (i == none || nnd[r] < nnd[i])) i = r;
    }
    const std::size_t j = nn[i];
    const double dij = at(i, j);
    const double ni = size[i], nj = size[j];
    dg.merges.push_back({node[i], node[j], linkage == Linkage::ward ? std::sqrt(dij) : dij, size[i] + size[j]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double dik = at(i, k), djk = at(j, k);
      double v = 0;
      switch (linkage) {
        case Linkage::single: v = std::min(dik, djk); break;
        case Linkage::complete: v = std::max(dik, djk); break;
        case Linkage::average: v = (ni * dik + nj * djk) / (ni + nj); break;
        case Linkage::ward: {
          const double nk = size[k];
          v = ((ni + nk) * dik + (nj + nk) * djk - nk * dij) / (ni + nj + nk);
          break;
        }
      }
      at(i, k) = v;
      at(k, i) = v;
    }
    active[j] = false;
    size[i] += size[j];
    node[i] = static_cast<int>(n + step);

    rescan(i);
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r] || r == i) continue;
      if (nn[r] == i || nn[r] == j) {
        rescan(r);
      } else if (r < i && (at(r, i) < nnd[r] || (at(r, i) == nnd[r] && i < nn[r]))) {
        nn[r] = i;
        nnd[r] = at(r, i);
      }
    }
  }
  return dg;
}

inline Dendrogram run_agglomerative(const Matrix& points, Linkage linkage) {
  return run_agglomerative(compute_distance_matrix(points), linkage);
}

/// Partition with exactly k clusters from the first n - k merges.
inline Partition cut_at(const Dendrogram& dg, int k) {
  if (k < 1 || k > dg.n) throw Error("cut_at: k=" + std::to_string(k) + " outside [1, " + std::to_string(dg.n) + "]");
  const int total = 2 * dg.n - 1;
  std::vector<int> parent(static_cast<std::size_t>(total));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int t = 0; t < dg.n - k; ++t) {
    const auto& m = dg.merges[static_cast<std::size_t>(t)];
    const int fresh = dg.n + t;
    parent[static_cast<std::size_t>(find(m.a))] = fresh;
    parent[static_cast<std::size_t>(find(m.b))] = fresh;
  }
  Labels labels(static_cast<std::size_t>(dg.n));
  for (int i = 0; i < dg.n; ++i) labels[static_cast<std::size_t>(i)] = find(i);
  return Partition::from_labels(canonical_form(labels), to_string(dg.linkage));
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  int k_min = 2;
  int k_max = 25;
  std::vector<Algorithm> algorithms{kAlgorithms.begin(), kAlgorithms.end()};
  int kmeans_restarts = 1;
};

/// One collection per algorithm, one partition per k in [k_min, min(k_max, N - 1)].
inline std::map<Algorithm, std::vector<Partition>> sweep_varied_k(const Matrix& points, const SweepSpec& spec,
                                                                  std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  const int hi = std::min(spec.k_max, n - 1);
  if (spec.k_min < 2 || spec.k_min > hi) {
    throw Error("invalid k range [" + std::to_string(spec.k_min) + ", " + std::to_string(hi) + "]");
  }
  std::map<Algorithm, std::vector<Partition>> out;
  std::optional<DistanceMatrix> dist;
  for (auto algo : spec.algorithms) {
    auto& coll = out[algo];
    if (algo == Algorithm::kmeans) {
      for (int k = spec.k_min; k <= hi; ++k) {
        coll.push_back(run_kmeans_restarts(points, k, derive_seed(seed, static_cast<std::uint64_t>(k)), spec.kmeans_restarts).partition);
      }
    } else {
      if (!dist) dist = compute_distance_matrix(points);
      const auto dg = run_agglomerative(*dist, linkage_of(algo));
      for (int k = spec.k_min; k <= hi; ++k) coll.push_back(cut_at(dg, k));
    }
  }
  return out;
}

/// Drops partitions identical (up to label renaming) to an earlier one.
inline std::vector<Partition> deduplicate(std::vector<Partition> partitions) {
  std::set<Labels> seen;
  std::vector<Partition> out;
  for (auto& p : partitions) {
    if (seen.insert(canonical_form(p)).second) out.push_back(std::move(p));
  }
  return out;
}

/**
 * @brief Fixed-k candidates: `kmeans_runs` seeded K-Means runs plus one cut
 * of each linkage, deduplicated.
 */
inline std::vector<Partition> fixed_k_candidates(const Matrix& points, int k, std::uint64_t seed, int kmeans_runs = 10) {
  std::vector<Partition> all;
  for (int r = 0; r < kmeans_runs; ++r) {
    auto p = run_kmeans(points, k, derive_seed(seed, static_cast<std::uint64_t>(r))).partition;
    p.source = "kmeans#" + std::to_string(r);
    all.push_back(std::move(p));
  }
  const auto dist = compute_distance_matrix(points);
  for (auto l : {Linkage::single, Linkage::average, Linkage::complete, Linkage::ward}) {
    all.push_back(cut_at(run_agglomerative(dist, l), k));
  }
  return deduplicate(std::move(all));
}

}  // namespace cvbench

#endif
