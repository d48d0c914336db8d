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

#ifndef CVBENCH_DATAGEN_HPP
#define CVBENCH_DATAGEN_HPP

#include "cvbench/core.hpp"

#include <algorithm>
#include <numeric>
#include <numbers>
#include <span>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

/**
 * @file datagen.hpp
 * @brief Synthetic globular cluster datasets with controlled size, balance,
 * compactness, overlap and background noise.
 */

namespace cvbench {

enum class ImbalanceMode { balanced, half_floor, tenth_floor };

inline std::string to_string(ImbalanceMode m) {
  switch (m) {
    case ImbalanceMode::balanced: return "balanced";
    case ImbalanceMode::half_floor: return "half_floor";
    case ImbalanceMode::tenth_floor: return "tenth_floor";
  }
  return "?";
}

inline ImbalanceMode parse_imbalance_mode(const std::string& s) {
  if (s == "balanced") return ImbalanceMode::balanced;
  if (s == "half_floor") return ImbalanceMode::half_floor;
  if (s == "tenth_floor") return ImbalanceMode::tenth_floor;
  throw Error("unknown imbalance mode '" + s + "'");
}

/// Cluster scale: one fixed value for every cluster, or U(0, 1] per cluster.
struct CompactnessSpec {
  bool random_unit = false;
  double value = 0.1;

  static CompactnessSpec fixed(double v) { return {false, v}; }
  static CompactnessSpec random() { return {true, 0.0}; }

  Compactness level() const {
    if (random_unit) return Compactness::random;
    return value < 0.45 ? Compactness::compact : Compactness::sparse;
  }
  std::string to_string() const {
    if (random_unit) return "random";
    std::ostringstream os;
    os << value;
    return os.str();
  }
};

struct GenConfig {
  int k_star = 2;
  int dimensions = 2;
  int min_cluster_size = 20;
  int max_cluster_size = 100;
  int total_cap = 1000;
  Distribution distribution = Distribution::gaussian;
  ImbalanceMode imbalance_mode = ImbalanceMode::balanced;
  CompactnessSpec compactness = CompactnessSpec::fixed(0.1);
  double noise_fraction = 0.0;
  double overlap_max = 0.10;
  /// Side of the center hypercube in units of mean_scale * rms * k^(1/D); at least 4.
  double spacing = 6.0;
  int max_attempts = 50;
  std::uint64_t seed = 0;

  std::string describe() const {
    std::ostringstream os;
    os << "k*=" << k_star << " D=" << dimensions << " dist=" << cvbench::to_string(distribution)
       << " imbalance=" << cvbench::to_string(imbalance_mode) << " compactness=" << compactness.to_string()
       << " noise=" << noise_fraction << " overlap_max=" << overlap_max << " seed=" << seed;
    return os.str();
  }
};

struct ClusterSpec {
  Vector center;
  double scale = 1.0;
  int size = 1;
  Distribution distribution = Distribution::gaussian;
};

inline void validate(const GenConfig& c) {
  auto fail = [&](const std::string& why) { throw Error("invalid generator config (" + c.describe() + "): " + why); };
  if (c.k_star < 2) fail("k* must be at least 2");
  if (c.dimensions < 1) fail("dimensions must be at least 1");
  if (c.min_cluster_size < 1 || c.min_cluster_size > c.max_cluster_size || c.max_cluster_size > c.total_cap) {
    fail("cluster size range must lie within [1, total_cap]");
  }
  if (static_cast<long>(c.k_star) * c.min_cluster_size > c.total_cap) fail("k* * min cluster size exceeds total cap");
  if (!(c.noise_fraction >= 0.0 && c.noise_fraction < 1.0)) fail("noise fraction must be in [0, 1)");
  if (!(c.overlap_max >= 0.0 && c.overlap_max <= 1.0)) fail("overlap_max must be in [0, 1]");
  if (!c.compactness.random_unit && !(c.compactness.value > 0.0)) fail("compactness must be positive");
  if (c.spacing < 4.0) fail("spacing must be at least 4");
  if (c.max_attempts < 1) fail("max_attempts must be positive");
}

/**
 * @brief Nearest-neighbour overlap: fraction of non-noise points whose nearest
 * non-noise neighbour belongs to another ground-truth cluster.
 *
 * Ties in neighbour distance go to the lowest index.
 */
inline double measure_overlap(const Matrix& points, std::span<const Label> labels) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.size() < 2) throw Error("overlap needs at least 2 non-noise points");
  std::size_t foreign = 0;
  for (auto i : rows) {
    Eigen::Index best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (auto j : rows) {
      if (j == i) continue;
      const double d = (points.row(i) - points.row(j)).squaredNorm();
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (labels[static_cast<std::size_t>(best)] != labels[static_cast<std::size_t>(i)]) ++foreign;
  }
  return static_cast<double>(foreign) / static_cast<double>(rows.size());
}

inline double measure_overlap(const Dataset& ds) { return measure_overlap(ds.points, ds.truth.labels); }

/// (N_max - N_min) / N_min over non-noise ground-truth clusters.
inline double measure_imbalance(std::span<const Label> labels) {
  const ClusterIndex ci(labels);
  if (ci.k() == 0) throw Error("imbalance needs at least one cluster");
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  for (const auto& m : ci.members) {
    lo = std::min(lo, m.size());
    hi = std::max(hi, m.size());
  }
  return static_cast<double>(hi - lo) / static_cast<double>(lo);
}

/// Sizes {N_1..N_k} variant for callers holding only counts.
inline double imbalance_of_sizes(std::span<const int> sizes) {
  if (sizes.empty()) throw Error("imbalance needs at least one cluster");
  const int lo = *std::min_element(sizes.begin(), sizes.end());
  const int hi = *std::max_element(sizes.begin(), sizes.end());
  if (lo <= 0) throw Error("imbalance undefined for an empty cluster");
  return static_cast<double>(hi - lo) / static_cast<double>(lo);
}

inline double measure_imbalance(const Dataset& ds) { return measure_imbalance(std::span<const Label>(ds.truth.labels)); }

/**
 * @brief Appends round(fraction * N) background points drawn uniformly inside
 * the per-dimension [min, max] box of the existing data, labelled NOISE.
 */
inline Dataset inject_noise(const Dataset& core, double fraction, std::mt19937_64& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("noise fraction must be in [0, 1)");
  if (count_noise(core.truth.labels) != 0) throw Error("inject_noise expects a noise-free dataset");
  const auto n_core = core.points.rows();
  const long extra = round_half_up(fraction * static_cast<double>(n_core));
  if (extra == 0) return core;

  Dataset out = core;
  const Eigen::RowVectorXd lo = core.points.colwise().minCoeff();
  const Eigen::RowVectorXd hi = core.points.colwise().maxCoeff();
  out.points.conservativeResize(n_core + extra, Eigen::NoChange);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = n_core; i < n_core + extra; ++i) {
    for (Eigen::Index d = 0; d < core.points.cols(); ++d) out.points(i, d) = lo(d) + unit(rng) * (hi(d) - lo(d));
  }
  Labels labels = core.truth.labels;
  labels.resize(static_cast<std::size_t>(n_core + extra), kNoise);
  out.truth = GroundTruth::from_labels(std::move(labels));
  out.meta.has_noise = true;
  return out;
}

inline Dataset inject_noise(const Dataset& core, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return inject_noise(core, fraction, rng);
}

namespace detail {

inline std::vector<int> draw_sizes(const GenConfig& c, std::mt19937_64& rng) {
  const int cap_mean = c.total_cap / c.k_star;
  std::uniform_int_distribution<int> size_dist(c.min_cluster_size, std::min(c.max_cluster_size, cap_mean));
  const int mean = size_dist(rng);
  std::vector<int> sizes(static_cast<std::size_t>(c.k_star), mean);
  if (c.imbalance_mode == ImbalanceMode::balanced) return sizes;

  const int floor_size = c.imbalance_mode == ImbalanceMode::half_floor ? (mean + 1) / 2 : std::max(1, (mean + 9) / 10);
  const int spare = c.k_star * (mean - floor_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(sizes.size());
  for (auto& x : w) x = unit(rng) + 1e-12;
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double share = spare * w[i] / wsum;
    const int whole = static_cast<int>(std::floor(share));
    sizes[i] = floor_size + whole;
    assigned += whole;
    remainders.emplace_back(share - whole, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int r = 0; r < spare - assigned; ++r) ++sizes[remainders[static_cast<std::size_t>(r)].second];
  return sizes;
}

inline double radial_draw(Distribution dist, double scale, std::mt19937_64& rng) {
  switch (dist) {
    case Distribution::gaussian: {
      std::normal_distribution<double> z(0.0, 1.0);
      return std::abs(scale * z(rng));
    }
    case Distribution::uniform: {
      std::uniform_real_distribution<double> u(0.0, scale);
      return u(rng);
    }
    case Distribution::logistic: {
      std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
      const double p = u(rng);
      return std::abs(scale * std::log(p / (1.0 - p)));
    }
  }
  return 0.0;
}

/// Root mean square of radial_draw at unit scale.
inline double radial_rms(Distribution dist) {
  switch (dist) {
    case Distribution::gaussian: return 1.0;
    case Distribution::uniform: return 1.0 / std::sqrt(3.0);
    case Distribution::logistic: return std::numbers::pi / std::sqrt(3.0);
  }
  return 1.0;
}

inline Vector unit_direction(int dims, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vector v(dims);
  do {
    for (int d = 0; d < dims; ++d) v(d) = z(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace detail

/**
 * @brief Draws the cluster layout (sizes, scales) without placing centers.
 */
inline std::vector<ClusterSpec> draw_cluster_specs(const GenConfig& c, std::mt19937_64& rng) {
  const auto sizes = detail::draw_sizes(c, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ClusterSpec> specs(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    specs[i].size = sizes[i];
    specs[i].scale = c.compactness.random_unit ? 1.0 - unit(rng) : c.compactness.value;
    specs[i].distribution = c.distribution;
  }
  return specs;
}

/**
 * @brief Generates one dataset.
 *
 * Points of cluster i are center_i + r * u with u a uniform random direction
 * and r a radial draw scaled by scale_i. Centers are uniform in a hypercube
 * whose side is spacing * mean_scale * rms * k^(1/D), where rms is the root
 * mean square radius of the distribution at unit scale. A layout whose overlap
 * exceeds overlap_max is redrawn, up to max_attempts times. Noise, if any,
 * is appended last.
 */
inline Dataset generate_dataset(const GenConfig& c) {
  validate(c);
  std::mt19937_64 rng(c.seed);
  auto specs = draw_cluster_specs(c, rng);
  double mean_scale = 0;
  for (const auto& s : specs) mean_scale += s.scale;
  mean_scale /= static_cast<double>(specs.size());
  const double side = c.spacing * mean_scale * detail::radial_rms(c.distribution) * std::pow(static_cast<double>(c.k_star), 1.0 / c.dimensions);

  int n_core = 0;
  for (const auto& s : specs) n_core += s.size;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 0; attempt < c.max_attempts; ++attempt) {
    for (auto& s : specs) {
      s.center = Vector(c.dimensions);
      for (int d = 0; d < c.dimensions; ++d) s.center(d) = side * unit(rng);
    }
    Dataset ds;
    ds.points.resize(n_core, c.dimensions);
    Labels labels;
    labels.reserve(static_cast<std::size_t>(n_core));
    Eigen::Index row = 0;
    for (std::size_t ci = 0; ci < specs.size(); ++ci) {
      for (int t = 0; t < specs[ci].size; ++t, ++row) {
        const double r = detail::radial_draw(specs[ci].distribution, specs[ci].scale, rng);
        ds.points.row(row) = (specs[ci].center + r * detail::unit_direction(c.dimensions, rng)).transpose();
        labels.push_back(static_cast<Label>(ci));
      }
    }
    const double overlap = measure_overlap(ds.points, labels);
    if (overlap > c.overlap_max) continue;

    ds.truth = GroundTruth::from_labels(std::move(labels));
    ds.meta.k_star = c.k_star;
    ds.meta.dimensions = c.dimensions;
    ds.meta.overlap = overlap;
    ds.meta.imbalance = measure_imbalance(std::span<const Label>(ds.truth.labels));
    ds.meta.compactness = c.compactness.level();
    ds.meta.distribution = c.distribution;
    ds.meta.has_noise = false;
    if (c.noise_fraction > 0) ds = inject_noise(ds, c.noise_fraction, rng);
    return ds;
  }
  throw Error("overlap constraint unattainable after " + std::to_string(c.max_attempts) + " attempts for config " +
              c.describe());
}

}  // namespace cvbench

#endif
