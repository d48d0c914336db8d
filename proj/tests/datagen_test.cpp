// Copyright 2026 The cvbench Authors
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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "cvbench/datagen.hpp"
#include "oracles.hpp"

namespace cvbench {
namespace {

std::vector<int> cluster_sizes(const Labels& l) {
  std::map<Label, int> c;
  for (Label v : l) {
    if (v != kNoise) c[v] += 1;
  }
  std::vector<int> out;
  for (const auto& [k, n] : c) out.push_back(n);
  return out;
}

TEST(Generate, SmallExample) {
  GenConfig c;
  c.k_star = 2;
  c.dimensions = 2;
  c.min_cluster_size = 50;
  c.max_cluster_size = 50;
  c.seed = 1;
  const auto ds = generate_dataset(c);
  EXPECT_EQ(ds.size(), 100u);
  EXPECT_EQ(ds.truth.k_star, 2);
  EXPECT_EQ(cluster_sizes(ds.truth.labels), (std::vector<int>{50, 50}));
  EXPECT_LE(ds.meta.overlap, 0.10);
  EXPECT_EQ(ds.meta.imbalance, 0.0);
  EXPECT_FALSE(ds.meta.has_noise);
  EXPECT_NO_THROW(validate(ds));
}

TEST(Generate, NoiseIsAppendedInsideBoundingBox) {
  GenConfig c;
  c.k_star = 4;
  c.min_cluster_size = 50;
  c.max_cluster_size = 50;
  c.noise_fraction = 0.1;
  c.seed = 2;
  const auto ds = generate_dataset(c);
  ASSERT_EQ(ds.size(), 220u);
  EXPECT_EQ(count_noise(ds.truth.labels), 20);
  EXPECT_TRUE(ds.meta.has_noise);
  const Matrix core = ds.points.topRows(200);
  const Eigen::RowVectorXd lo = core.colwise().minCoeff(), hi = core.colwise().maxCoeff();
  for (Eigen::Index i = 200; i < 220; ++i) {
    EXPECT_EQ(ds.truth.labels[static_cast<std::size_t>(i)], kNoise);
    EXPECT_TRUE((ds.points.row(i).array() >= lo.array()).all());
    EXPECT_TRUE((ds.points.row(i).array() <= hi.array()).all());
  }
  // Overlap is measured on the core points only.
  EXPECT_NEAR(ds.meta.overlap, oracle::nn_overlap(core, Labels(ds.truth.labels.begin(), ds.truth.labels.begin() + 200)), 1e-12);
}

TEST(Generate, Deterministic) {
  GenConfig c;
  c.k_star = 5;
  c.dimensions = 3;
  c.seed = 77;
  const auto a = generate_dataset(c), b = generate_dataset(c);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.truth.labels, b.truth.labels);
  c.seed = 78;
  EXPECT_NE(generate_dataset(c).points, a.points);
}

TEST(Overlap, Examples) {
  Matrix x(4, 1);
  x << 0, 1, 10, 11;
  EXPECT_EQ(measure_overlap(x, Labels{0, 0, 1, 1}), 0.0);
  EXPECT_EQ(measure_overlap(x, Labels{0, 1, 0, 1}), 1.0);
  EXPECT_EQ(measure_overlap(x, Labels{0, 0, 0, 1}), 0.5);
  EXPECT_EQ(measure_overlap(x, Labels{0, 0, kNoise, 1}), 1.0 / 3.0);
  EXPECT_THROW(measure_overlap(x, Labels{0, kNoise, kNoise, kNoise}), Error);
}

TEST(Overlap, MatchesOracle) {
  std::mt19937_64 rng(40);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    const int n = 5 + static_cast<int>(rng() % 40);
    Matrix x(n, 2);
    Labels l(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x(i, 0) = z(rng);
      x(i, 1) = z(rng);
      l[static_cast<std::size_t>(i)] = static_cast<Label>(rng() % 3);
    }
    EXPECT_NEAR(measure_overlap(x, l), oracle::nn_overlap(x, l), 1e-12);
  }
}

TEST(Imbalance, Examples) {
  EXPECT_EQ(imbalance_of_sizes(std::vector<int>{50, 50, 50}), 0.0);
  EXPECT_EQ(imbalance_of_sizes(std::vector<int>{60, 20}), 2.0);
  EXPECT_EQ(imbalance_of_sizes(std::vector<int>{100, 40, 10}), 9.0);
  EXPECT_EQ(measure_imbalance(std::span<const Label>(Labels{0, 0, 0, 1, kNoise, kNoise})), 2.0);
  EXPECT_THROW(imbalance_of_sizes(std::vector<int>{}), Error);
}

TEST(InjectNoise, Counts) {
  Dataset core;
  core.points = Matrix::Random(100, 3);
  Labels l(100);
  for (std::size_t i = 0; i < 100; ++i) l[i] = static_cast<Label>(i % 4);
  core.truth = GroundTruth::from_labels(l);
  EXPECT_EQ(inject_noise(core, 0.0, std::uint64_t{1}).size(), 100u);
  const auto noisy = inject_noise(core, 0.1, std::uint64_t{1});
  EXPECT_EQ(noisy.size(), 110u);
  EXPECT_EQ(count_noise(noisy.truth.labels), 10);
  EXPECT_NEAR(noisy.truth.noise_fraction, 10.0 / 110.0, 1e-15);
  EXPECT_THROW(inject_noise(noisy, 0.1, std::uint64_t{1}), Error);
  EXPECT_THROW(inject_noise(core, 1.0, std::uint64_t{1}), Error);
}

TEST(Generate, TagsMatchRemeasurement) {
  const Distribution dists[] = {Distribution::gaussian, Distribution::uniform, Distribution::logistic};
  const ImbalanceMode modes[] = {ImbalanceMode::balanced, ImbalanceMode::half_floor, ImbalanceMode::tenth_floor};
  std::uint64_t seed = 100;
  for (int k : {2, 5, 10}) {
    for (int d : {2, 5}) {
      for (auto dist : dists) {
        for (auto mode : modes) {
          GenConfig c;
          c.k_star = k;
          c.dimensions = d;
          c.distribution = dist;
          c.imbalance_mode = mode;
          c.compactness = seed % 2 ? CompactnessSpec::random() : CompactnessSpec::fixed(0.1);
          c.seed = seed++;
          const auto ds = generate_dataset(c);
          EXPECT_EQ(ds.meta.k_star, k);
          EXPECT_EQ(ds.meta.dimensions, d);
          EXPECT_EQ(ds.meta.distribution, dist);
          EXPECT_LE(ds.meta.overlap, c.overlap_max);
          EXPECT_NEAR(ds.meta.overlap, oracle::nn_overlap(ds.points, ds.truth.labels), 1e-12);
          EXPECT_NEAR(ds.meta.imbalance, imbalance_of_sizes(cluster_sizes(ds.truth.labels)), 1e-12);
          EXPECT_LE(static_cast<int>(ds.size()), c.total_cap);

          const auto sizes = cluster_sizes(ds.truth.labels);
          const int lo = *std::min_element(sizes.begin(), sizes.end());
          const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
          EXPECT_EQ(total % k, 0);
          const int mean = total / k;
          EXPECT_GE(mean, c.min_cluster_size);
          EXPECT_LE(mean, c.max_cluster_size);
          const int floor_size = mode == ImbalanceMode::balanced     ? mean
                                 : mode == ImbalanceMode::half_floor ? (mean + 1) / 2
                                                                     : (mean + 9) / 10;
          EXPECT_GE(lo, floor_size);
        }
      }
    }
  }
}

TEST(Generate, ClusterSpreadFollowsScale) {
  const std::pair<Distribution, double> cases[] = {{Distribution::gaussian, 1.0},
                                                   {Distribution::uniform, 1.0 / 3.0},
                                                   {Distribution::logistic, std::numbers::pi * std::numbers::pi / 3.0}};
  for (const auto& [dist, mean_sq_radius] : cases) {
    GenConfig c;
    c.k_star = 2;
    c.dimensions = 3;
    c.min_cluster_size = 800;
    c.max_cluster_size = 800;
    c.total_cap = 1600;
    c.compactness = CompactnessSpec::fixed(0.5);
    c.distribution = dist;
    c.seed = 5;
    const auto ds = generate_dataset(c);
    for (Label g : {0, 1}) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.truth.labels[i] == g) rows.push_back(static_cast<Eigen::Index>(i));
      }
      const Matrix pts = ds.points(rows, Eigen::all);
      const Eigen::RowVectorXd mu = pts.colwise().mean();
      const double trace = (pts.rowwise() - mu).squaredNorm() / static_cast<double>(rows.size() - 1);
      EXPECT_NEAR(trace / (0.25 * mean_sq_radius), 1.0, 0.25) << to_string(dist);
    }
  }
}

TEST(Generate, UnattainableOverlapIsReported) {
  GenConfig c;
  c.k_star = 10;
  c.dimensions = 1;
  c.spacing = 4.0;
  c.compactness = CompactnessSpec::fixed(1.0);
  c.distribution = Distribution::logistic;
  c.overlap_max = 0.0;
  c.max_attempts = 3;
  EXPECT_THROW(generate_dataset(c), Error);
}

TEST(Generate, RejectsInvalidConfig) {
  GenConfig c;
  c.k_star = 1;
  EXPECT_THROW(generate_dataset(c), Error);
  c = GenConfig{};
  c.k_star = 60;
  EXPECT_THROW(generate_dataset(c), Error);
  c = GenConfig{};
  c.spacing = 3.0;
  EXPECT_THROW(generate_dataset(c), Error);
  c = GenConfig{};
  c.noise_fraction = 1.0;
  EXPECT_THROW(generate_dataset(c), Error);
}

TEST(Names, RoundTrip) {
  for (auto m : {ImbalanceMode::balanced, ImbalanceMode::half_floor, ImbalanceMode::tenth_floor}) {
    EXPECT_EQ(parse_imbalance_mode(to_string(m)), m);
  }
  EXPECT_EQ(CompactnessSpec::fixed(0.1).level(), Compactness::compact);
  EXPECT_EQ(CompactnessSpec::fixed(0.8).level(), Compactness::sparse);
  EXPECT_EQ(CompactnessSpec::random().level(), Compactness::random);
}

}  // namespace
}  // namespace cvbench
