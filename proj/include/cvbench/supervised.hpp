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

#ifndef CVBENCH_SUPERVISED_HPP
#define CVBENCH_SUPERVISED_HPP

#include "cvbench/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

/**
 * @file supervised.hpp
 * @brief Partitions with a known quality order, built from the ground truth of
 * Gaussian datasets without any clustering algorithm.
 *
 * Procedure 1 merges pairs of ground-truth clusters in increasing order of
 * symmetric KL divergence (k < k*). Procedure 2 splits clusters through their
 * mean along a principal axis, largest volume first (k > k*).
 */

namespace cvbench {

/// Smallest ranked set that is used for evaluation.
inline constexpr std::size_t kMinRankedPartitions = 5;

struct GaussianFit {
  Vector mean;
  Eigen::MatrixXd covariance;
  std::size_t size = 0;
  bool regularized = false;

  int dimensions() const { return static_cast<int>(mean.size()); }
  double log_det() const {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw Error("covariance is not positive-definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }
};

/**
 * @brief Maximum-likelihood Gaussian of a set of rows. When the smallest
 * eigenvalue is below 1e-10 * trace, 1e-6 * trace / D is added to the diagonal.
 */
inline GaussianFit fit_gaussian(const Matrix& points, std::span<const std::size_t> rows) {
  if (rows.size() < 2) throw Error("gaussian fit needs at least 2 points, got " + std::to_string(rows.size()));
  const auto dims = points.cols();
  GaussianFit g;
  g.size = rows.size();
  g.mean = Vector::Zero(dims);
  for (auto r : rows) g.mean += points.row(static_cast<Eigen::Index>(r)).transpose();
  g.mean /= static_cast<double>(rows.size());
  g.covariance = Eigen::MatrixXd::Zero(dims, dims);
  for (auto r : rows) {
    const Vector c = points.row(static_cast<Eigen::Index>(r)).transpose() - g.mean;
    g.covariance.noalias() += c * c.transpose();
  }
  g.covariance /= static_cast<double>(rows.size());

  const double trace = g.covariance.trace();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.covariance, Eigen::EigenvaluesOnly);
  if (trace <= 0.0) {
    g.covariance += 1e-6 * Eigen::MatrixXd::Identity(dims, dims);
    g.regularized = true;
  } else if (es.eigenvalues().minCoeff() < 1e-10 * trace) {
    g.covariance += 1e-6 * trace / static_cast<double>(dims) * Eigen::MatrixXd::Identity(dims, dims);
    g.regularized = true;
  }
  return g;
}

/// One fit per ground-truth cluster, in ascending label order.
inline std::vector<GaussianFit> fit_cluster_gaussians(const Dataset& ds) {
  if (count_noise(ds.truth.labels) != 0) throw Error("dataset '" + ds.id + "': gaussian fits need noise-free data");
  const ClusterIndex ci(ds.truth.labels);
  std::vector<GaussianFit> fits;
  for (std::size_t c = 0; c < ci.k(); ++c) {
    if (ci.members[c].size() < 2) {
      throw Error("dataset '" + ds.id + "': cluster " + std::to_string(ci.ids[c]) + " has fewer than 2 points");
    }
    fits.push_back(fit_gaussian(ds.points, ci.members[c]));
  }
  return fits;
}

/// (KL(a||b) + KL(b||a)) / 2 for multivariate Gaussians.
inline double symmetric_kl(const GaussianFit& a, const GaussianFit& b) {
  if (a.dimensions() != b.dimensions()) throw Error("symmetric_kl: dimension mismatch");
  const Eigen::LLT<Eigen::MatrixXd> la(a.covariance), lb(b.covariance);
  if (la.info() != Eigen::Success || lb.info() != Eigen::Success) throw Error("symmetric_kl: singular covariance");
  const Vector delta = b.mean - a.mean;
  const double tr_ab = lb.solve(a.covariance).trace();
  const double tr_ba = la.solve(b.covariance).trace();
  const double quad = delta.dot(la.solve(delta)) + delta.dot(lb.solve(delta));
  // The log-determinant terms cancel in the symmetric sum.
  return std::max(0.0, 0.25 * (tr_ab + tr_ba + quad - 2.0 * a.dimensions()));
}

enum class SupervisedVariant { p1_varied, p1_fixed, p2_varied, p2_fixed };

inline std::string to_string(SupervisedVariant v) {
  switch (v) {
    case SupervisedVariant::p1_varied: return "p1_varied";
    case SupervisedVariant::p1_fixed: return "p1_fixed";
    case SupervisedVariant::p2_varied: return "p2_varied";
    case SupervisedVariant::p2_fixed: return "p2_fixed";
  }
  return "?";
}

inline SupervisedVariant parse_supervised_variant(const std::string& s) {
  for (auto v : {SupervisedVariant::p1_varied, SupervisedVariant::p1_fixed, SupervisedVariant::p2_varied,
                 SupervisedVariant::p2_fixed}) {
    if (to_string(v) == s) return v;
  }
  throw Error("unknown supervised variant '" + s + "'");
}

/**
 * @brief Partitions ordered best first with ranks 1..m.
 *
 * A set with fewer than kMinRankedPartitions partitions is still returned so
 * callers can inspect it, but emitted() is false and it is not evaluated.
 */
struct RankedPartitionSet {
  SupervisedVariant variant = SupervisedVariant::p1_varied;
  std::vector<Partition> partitions;
  std::vector<double> reference_ranks;
  /// Merge divergences (p1) per partition; empty for p2.
  std::vector<std::vector<double>> merge_divergences;
  std::vector<std::string> warnings;
  int rejected_runs = 0;

  bool emitted() const { return partitions.size() >= kMinRankedPartitions; }

  void push(Partition p) {
    partitions.push_back(std::move(p));
    reference_ranks.push_back(static_cast<double>(partitions.size()));
  }
};

namespace detail {

inline std::vector<std::vector<double>> divergence_matrix(const std::vector<GaussianFit>& fits) {
  const std::size_t k = fits.size();
  std::vector<std::vector<double>> kl(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) kl[i][j] = kl[j][i] = symmetric_kl(fits[i], fits[j]);
  }
  return kl;
}

/// Eigenpairs sorted by eigenvalue descending; equal eigenvalues fall back to
/// the lexicographically smaller vector. Each vector's first non-zero entry is positive.
inline std::vector<Vector> principal_axes(const Eigen::MatrixXd& cov) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const auto dims = cov.rows();
  std::vector<std::pair<double, Vector>> pairs;
  for (Eigen::Index i = 0; i < dims; ++i) {
    Vector v = es.eigenvectors().col(i);
    for (Eigen::Index t = 0; t < dims; ++t) {
      if (std::abs(v(t)) > 1e-12) {
        if (v(t) < 0) v = -v;
        break;
      }
    }
    pairs.emplace_back(es.eigenvalues()(i), v);
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > tol) return a.first > b.first;
    return std::lexicographical_compare(a.second.data(), a.second.data() + a.second.size(), b.second.data(),
                                        b.second.data() + b.second.size());
  });
  std::vector<Vector> out;
  for (auto& p : pairs) out.push_back(std::move(p.second));
  return out;
}

/// Cluster positions (into ClusterIndex order) by log-det descending; ties keep label order.
inline std::vector<std::size_t> volume_order(const std::vector<GaussianFit>& fits) {
  std::vector<double> vol(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) vol[i] = fits[i].log_det();
  std::vector<std::size_t> order(fits.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vol[a] > vol[b]; });
  return order;
}

inline void require_gaussian_noise_free(const Dataset& ds) {
  if (count_noise(ds.truth.labels) != 0) {
    throw Error("dataset '" + ds.id + "': supervised partitions need noise-free data");
  }
  if (ds.meta.distribution != Distribution::gaussian) {
    throw Error("dataset '" + ds.id + "': supervised partitions need gaussian clusters");
  }
}

using PairKey = std::pair<std::size_t, std::size_t>;

struct MergeRun {
  std::vector<PairKey> pairs;
  std::vector<double> divergences;
};

/// Greedy merges of unmerged original clusters, skipping excluded pairs, up to `merges` steps.
inline MergeRun greedy_merges(const std::vector<std::vector<double>>& kl, std::size_t merges,
                              const std::set<PairKey>& excluded) {
  const std::size_t k = kl.size();
  std::vector<bool> frozen(k, false);
  MergeRun run;
  for (std::size_t step = 0; step < merges; ++step) {
    std::optional<PairKey> best;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      if (frozen[i]) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (frozen[j] || excluded.count({i, j})) continue;
        if (kl[i][j] < bd) {
          bd = kl[i][j];
          best = PairKey{i, j};
        }
      }
    }
    if (!best) break;
    frozen[best->first] = frozen[best->second] = true;
    run.pairs.push_back(*best);
    run.divergences.push_back(bd);
  }
  return run;
}

/// Ground truth with the listed cluster pairs (ClusterIndex positions) merged, first `count` pairs only.
inline Labels apply_merges(const Dataset& ds, const ClusterIndex& ci, const std::vector<PairKey>& pairs,
                           std::size_t count) {
  std::vector<Label> target(ci.k());
  for (std::size_t c = 0; c < ci.k(); ++c) target[c] = static_cast<Label>(c);
  for (std::size_t m = 0; m < count; ++m) target[pairs[m].second] = static_cast<Label>(pairs[m].first);
  Labels out(ds.truth.labels.size());
  for (std::size_t c = 0; c < ci.k(); ++c) {
    for (auto r : ci.members[c]) out[r] = target[c];
  }
  return canonical_form(out);
}

/// Splits cluster `c` of `labels` through its mean along `axis`; the positive side gets `new_label`.
inline bool split_cluster(Labels& labels, const Matrix& points, const std::vector<std::size_t>& rows,
                          const GaussianFit& fit, const Vector& axis, Label new_label) {
  std::vector<std::size_t> positive;
  for (auto r : rows) {
    const double side = (points.row(static_cast<Eigen::Index>(r)).transpose() - fit.mean).dot(axis);
    if (side > 0.0) positive.push_back(r);
  }
  if (positive.empty() || positive.size() == rows.size()) return false;
  for (auto r : positive) labels[r] = new_label;
  return true;
}

inline std::string source_tag(SupervisedVariant v, std::size_t rank) {
  return to_string(v) + "#" + std::to_string(rank);
}

}  // namespace detail

/**
 * @brief Procedure 1, varied k.
 *
 * Starting from the ground truth, repeatedly merges the pair of original
 * clusters with the smallest symmetric KL divergence. A merged cluster is not
 * merged again and divergences are not recomputed. Ground truth is rank 1 and
 * every merge emits the next rank.
 */
inline RankedPartitionSet procedure1_varied(const Dataset& ds) {
  detail::require_gaussian_noise_free(ds);
  const ClusterIndex ci(ds.truth.labels);
  const auto kl = detail::divergence_matrix(fit_cluster_gaussians(ds));
  const auto run = detail::greedy_merges(kl, ci.k() / 2, {});

  RankedPartitionSet set;
  set.variant = SupervisedVariant::p1_varied;
  for (std::size_t m = 0; m <= run.pairs.size(); ++m) {
    set.push(Partition::from_labels(detail::apply_merges(ds, ci, run.pairs, m),
                                    detail::source_tag(set.variant, set.partitions.size() + 1)));
    set.merge_divergences.emplace_back(run.divergences.begin(), run.divergences.begin() + static_cast<long>(m));
  }
  return set;
}

/**
 * @brief Procedure 2, varied k.
 *
 * Clusters are visited by decreasing Gaussian volume (log-determinant of the
 * covariance) and each is split once by the hyperplane through its mean
 * orthogonal to its top eigenvector. Ground truth is rank 1 and every split
 * emits the next rank. A split leaving one side empty is skipped with a warning.
 */
inline RankedPartitionSet procedure2_varied(const Dataset& ds) {
  detail::require_gaussian_noise_free(ds);
  const ClusterIndex ci(ds.truth.labels);
  const auto fits = fit_cluster_gaussians(ds);

  RankedPartitionSet set;
  set.variant = SupervisedVariant::p2_varied;
  Labels labels = canonical_form(ds.truth.labels);
  set.push(Partition::from_labels(labels, detail::source_tag(set.variant, 1)));
  Label next = static_cast<Label>(ci.k());
  for (auto c : detail::volume_order(fits)) {
    const auto axis = detail::principal_axes(fits[c].covariance).front();
    if (!detail::split_cluster(labels, ds.points, ci.members[c], fits[c], axis, next)) {
      set.warnings.push_back("cluster " + std::to_string(ci.ids[c]) + ": split leaves one side empty");
      continue;
    }
    ++next;
    set.push(Partition::from_labels(canonical_form(labels), detail::source_tag(set.variant, set.partitions.size() + 1)));
  }
  return set;
}

/**
 * @brief Fixed-k variants: every partition has exactly target_k clusters and
 * earlier runs are better.
 *
 * p1: run r repeats the greedy merging down to target_k while skipping every
 * pair merged by an earlier attempt. A run whose n-th merge divergence is
 * smaller than the n-th divergence of the previous accepted run is rejected
 * (counted in rejected_runs) and its pairs are still excluded afterwards.
 *
 * p2: run r splits the target_k - k* largest-volume clusters along their r-th
 * principal axis.
 */
inline RankedPartitionSet procedure_fixed_k(const Dataset& ds, SupervisedVariant variant, int target_k, int runs = 5) {
  detail::require_gaussian_noise_free(ds);
  if (runs < 1) throw Error("runs must be positive");
  const ClusterIndex ci(ds.truth.labels);
  const auto fits = fit_cluster_gaussians(ds);
  const int k_star = static_cast<int>(ci.k());

  RankedPartitionSet set;
  set.variant = variant;
  if (variant == SupervisedVariant::p1_fixed) {
    if (target_k < 1 || target_k >= k_star) throw Error("p1 fixed-k needs target_k < k*");
    const auto merges = static_cast<std::size_t>(k_star - target_k);
    if (2 * merges > static_cast<std::size_t>(k_star)) {
      set.warnings.push_back("target_k unreachable without re-merging");
      return set;
    }
    const auto kl = detail::divergence_matrix(fits);
    std::set<detail::PairKey> excluded;
    std::optional<detail::MergeRun> previous;
    while (set.partitions.size() < static_cast<std::size_t>(runs)) {
      auto run = detail::greedy_merges(kl, merges, excluded);
      if (run.pairs.size() < merges) break;
      excluded.insert(run.pairs.begin(), run.pairs.end());
      bool monotone = true;
      if (previous) {
        for (std::size_t n = 0; n < merges; ++n) monotone = monotone && run.divergences[n] >= previous->divergences[n];
      }
      if (!monotone) {
        ++set.rejected_runs;
        continue;
      }
      set.push(Partition::from_labels(detail::apply_merges(ds, ci, run.pairs, merges),
                                      detail::source_tag(variant, set.partitions.size() + 1)));
      set.merge_divergences.push_back(run.divergences);
      previous = std::move(run);
    }
    return set;
  }

  if (variant != SupervisedVariant::p2_fixed) throw Error("procedure_fixed_k needs p1_fixed or p2_fixed");
  if (target_k <= k_star) throw Error("p2 fixed-k needs target_k > k*");
  const auto splits = static_cast<std::size_t>(target_k - k_star);
  if (splits > static_cast<std::size_t>(k_star)) {
    set.warnings.push_back("target_k unreachable without re-splitting");
    return set;
  }
  const auto order = detail::volume_order(fits);
  std::vector<std::vector<Vector>> axes;
  for (const auto& f : fits) axes.push_back(detail::principal_axes(f.covariance));
  const int dims = ds.dimensions();
  for (int r = 0; r < std::min(runs, dims); ++r) {
    Labels labels = canonical_form(ds.truth.labels);
    Label next = static_cast<Label>(k_star);
    std::size_t done = 0;
    for (auto c : order) {
      if (done == splits) break;
      if (!detail::split_cluster(labels, ds.points, ci.members[c], fits[c], axes[c][static_cast<std::size_t>(r)], next)) {
        set.warnings.push_back("run " + std::to_string(r + 1) + ", cluster " + std::to_string(ci.ids[c]) +
                               ": split leaves one side empty");
        continue;
      }
      ++next;
      ++done;
    }
    if (done < splits) {
      set.warnings.push_back("run " + std::to_string(r + 1) + ": not enough splittable clusters");
      break;
    }
    set.push(Partition::from_labels(canonical_form(labels), detail::source_tag(variant, set.partitions.size() + 1)));
  }
  return set;
}

}  // namespace cvbench

#endif
