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

#include <random>

#include "cvbench/external_indexes.hpp"
#include "oracles.hpp"

namespace cvbench {
namespace {

Labels random_labels(std::size_t n, int k, std::mt19937_64& rng) {
  Labels l(n);
  for (auto& v : l) v = static_cast<Label>(rng() % static_cast<unsigned>(k));
  return l;
}

/// Pair counts by looking at every pair.
PairCounts brute_pairs(const Labels& a, const Labels& b) {
  PairCounts pc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool ta = a[i] == a[j], tb = b[i] == b[j];
      if (ta && tb) pc.n11 += 1;
      else if (ta) pc.n10 += 1;
      else if (tb) pc.n01 += 1;
      else pc.n00 += 1;
    }
  }
  return pc;
}

double brute_entropy(const Labels& a) {
  std::map<Label, double> c;
  for (Label v : a) c[v] += 1;
  double h = 0;
  for (const auto& [k, v] : c) h -= v / a.size() * std::log(v / a.size());
  return h;
}

double brute_mi(const Labels& a, const Labels& b) {
  std::map<std::pair<Label, Label>, double> joint;
  std::map<Label, double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  const double n = static_cast<double>(a.size());
  double mi = 0;
  for (const auto& [k, v] : joint) mi += v / n * std::log(v * n / (ca[k.first] * cb[k.second]));
  return mi;
}

TEST(PairCounts, Examples) {
  const auto same = pair_counts(Labels{0, 0, 1, 1}, Labels{0, 0, 1, 1});
  EXPECT_EQ(same.n11, 2);
  EXPECT_EQ(same.n00, 4);
  EXPECT_EQ(same.n10, 0);
  EXPECT_EQ(same.n01, 0);
  const auto cross = pair_counts(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1});
  EXPECT_EQ(cross.n11, 0);
  EXPECT_EQ(cross.n10, 2);
  EXPECT_EQ(cross.n01, 2);
  EXPECT_EQ(cross.n00, 2);
  EXPECT_EQ(cross.total(), 6);
  EXPECT_THROW(pair_counts(Labels{0, 1}, Labels{0}), Error);
}

TEST(PairCounts, MatchBruteForce) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 40;
    const auto a = random_labels(n, 1 + static_cast<int>(rng() % 5), rng);
    const auto b = random_labels(n, 1 + static_cast<int>(rng() % 5), rng);
    const auto pc = pair_counts(a, b), o = brute_pairs(a, b);
    EXPECT_EQ(pc.n11, o.n11);
    EXPECT_EQ(pc.n10, o.n10);
    EXPECT_EQ(pc.n01, o.n01);
    EXPECT_EQ(pc.n00, o.n00);
  }
}

TEST(ExternalScore, IdenticalPartitions) {
  const Labels p{0, 0, 1, 1, 2};
  EXPECT_DOUBLE_EQ(external_score(ExternalIndex::ari, p, p), 1.0);
  EXPECT_DOUBLE_EQ(external_score(ExternalIndex::jaccard, p, p), 1.0);
  EXPECT_NEAR(external_score(ExternalIndex::nmi, p, p), 1.0, 1e-12);
  EXPECT_NEAR(external_score(ExternalIndex::nid, p, p), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(external_score(ExternalIndex::ss3, p, p), 1.0);
}

TEST(ExternalScore, CrossedPartitions) {
  const Labels a{0, 0, 1, 1}, b{0, 1, 0, 1};
  EXPECT_NEAR(external_score(ExternalIndex::ari, a, b), -0.5, 1e-12);
  EXPECT_EQ(external_score(ExternalIndex::jaccard, a, b), 0.0);
  EXPECT_EQ(external_score(ExternalIndex::ss3, a, b), 0.0);
  EXPECT_NEAR(external_score(ExternalIndex::nmi, a, b), 0.0, 1e-12);
  EXPECT_NEAR(external_score(ExternalIndex::nid, a, b), 1.0, 1e-12);
}

TEST(ExternalScore, IndependentLabelsGiveAriNearZero) {
  std::mt19937_64 rng(21);
  const auto a = random_labels(5000, 4, rng), b = random_labels(5000, 4, rng);
  EXPECT_NEAR(external_score(ExternalIndex::ari, a, b), 0.0, 0.01);
}

TEST(ExternalScore, MatchesDefinitions) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng() % 40;
    const auto a = random_labels(n, 2 + static_cast<int>(rng() % 4), rng);
    const auto b = random_labels(n, 2 + static_cast<int>(rng() % 4), rng);
    if (count_clusters(a) < 2 || count_clusters(b) < 2) continue;
    const auto pc = brute_pairs(a, b);
    EXPECT_NEAR(external_score(ExternalIndex::jaccard, a, b), pc.n11 / (pc.n11 + pc.n10 + pc.n01), 1e-12);
    const double ss3_denom = (pc.n11 + pc.n10) * (pc.n11 + pc.n01) * (pc.n00 + pc.n10) * (pc.n00 + pc.n01);
    if (ss3_denom > 0) {
      EXPECT_NEAR(external_score(ExternalIndex::ss3, a, b), pc.n11 * pc.n00 / std::sqrt(ss3_denom), 1e-12);
    }
    EXPECT_NEAR(external_score(ExternalIndex::ari, a, b), oracle::ari(a, b), 1e-12);
    const double ha = brute_entropy(a), hb = brute_entropy(b), mi = brute_mi(a, b);
    EXPECT_NEAR(external_score(ExternalIndex::nmi, a, b), std::max(0.0, mi / std::sqrt(ha * hb)), 1e-12);
    EXPECT_NEAR(external_score(ExternalIndex::nid, a, b), std::min(1.0, 1.0 - mi / std::max(ha, hb)), 1e-12);
  }
}

TEST(ExternalScore, PermutationInvariantAndSymmetric) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 3 + rng() % 30;
    const auto a = random_labels(n, 1 + static_cast<int>(rng() % 5), rng);
    const auto b = random_labels(n, 1 + static_cast<int>(rng() % 5), rng);
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels pa = a;
    for (auto& v : pa) v = perm[static_cast<std::size_t>(v)] * 3 + 1;
    const auto s = external_scores(a, b), sp = external_scores(pa, b), sym = external_scores(b, a);
    for (std::size_t e = 0; e < s.size(); ++e) {
      EXPECT_NEAR(s[e], sp[e], 1e-12);
      EXPECT_NEAR(s[e], sym[e], 1e-12);
    }
  }
}

TEST(ExternalScore, SingleClusterConventions) {
  const Labels one{0, 0, 0, 0}, two{0, 0, 1, 1};
  EXPECT_EQ(external_score(ExternalIndex::nmi, one, one), 1.0);
  EXPECT_EQ(external_score(ExternalIndex::nid, one, one), 0.0);
  EXPECT_EQ(external_score(ExternalIndex::nmi, one, two), 0.0);
  EXPECT_EQ(external_score(ExternalIndex::nid, one, two), 1.0);
  EXPECT_EQ(external_score(ExternalIndex::ari, one, one), 1.0);
}

TEST(ExternalScore, NoiseConvention) {
  // Both-noise rows drop out; candidate-only noise points are singletons.
  const Labels truth{0, 0, 1, 1, kNoise};
  const Labels cand{0, 0, 1, 1, kNoise};
  EXPECT_EQ(external_score(ExternalIndex::ari, truth, cand), 1.0);
  const Labels cand_noisy{0, kNoise, 1, 1, kNoise};
  const auto pc = pair_counts(truth, cand_noisy);
  EXPECT_EQ(pc.total(), 6);
  EXPECT_EQ(pc.n10, 1);
  EXPECT_EQ(pc.n11, 1);
  const Labels truth_clean{0, 0, 1, 1}, cand_split{0, kNoise, 1, kNoise};
  EXPECT_EQ(pair_counts(truth_clean, cand_split).n11, 0);
}

TEST(Aggregate, GroundTruthRanksFirst) {
  const Labels truth{0, 0, 0, 1, 1, 1, 2, 2, 2};
  const std::vector<Labels> cands{{0, 0, 0, 0, 0, 0, 1, 1, 1}, truth, {0, 1, 2, 0, 1, 2, 0, 1, 2}, {0, 0, 1, 1, 2, 2, 3, 3, 3}};
  std::vector<ExternalScores> s;
  for (const auto& c : cands) s.push_back(external_scores(truth, c));
  const auto r = aggregate_external_ranks(s);
  EXPECT_EQ(r[1], 1.0);
}

TEST(Aggregate, IdenticalPartitionsTie) {
  const Labels truth{0, 0, 1, 1, 2, 2};
  const std::vector<Labels> cands{{0, 0, 0, 1, 1, 1}, {0, 0, 0, 1, 1, 1}, {0, 1, 0, 1, 0, 1}};
  std::vector<ExternalScores> s;
  for (const auto& c : cands) s.push_back(external_scores(truth, c));
  const auto r = aggregate_external_ranks(s);
  EXPECT_EQ(r[0], r[1]);
  EXPECT_THROW(aggregate_external_ranks(std::span<const ExternalScores>(s.data(), 1)), Error);
}

TEST(Aggregate, MatchesSumOfRanksOracle) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 5;
    const auto truth = random_labels(30, 3, rng);
    std::vector<ExternalScores> s;
    for (std::size_t p = 0; p < m; ++p) s.push_back(external_scores(truth, random_labels(30, 2 + static_cast<int>(rng() % 4), rng)));
    std::vector<std::vector<double>> cols(kExternalIndexes.size(), std::vector<double>(m));
    std::vector<bool> smaller;
    for (std::size_t e = 0; e < kExternalIndexes.size(); ++e) {
      for (std::size_t p = 0; p < m; ++p) cols[e][p] = s[p][e];
      smaller.push_back(orientation(kExternalIndexes[e]) == Orientation::min);
    }
    EXPECT_EQ(aggregate_external_ranks(s), oracle::sum_of_ranks(cols, smaller));

    // Strictly increasing transform of one column leaves the aggregate unchanged.
    auto shifted = s;
    for (auto& row : shifted) row[0] = std::exp(3 * row[0]) - 7;
    EXPECT_EQ(aggregate_external_ranks(s), aggregate_external_ranks(shifted));
  }
}

TEST(Names, RoundTrip) {
  for (auto e : kExternalIndexes) EXPECT_EQ(parse_external_index(to_string(e)), e);
  EXPECT_THROW(parse_external_index("cdistance"), Error);
  EXPECT_EQ(orientation(ExternalIndex::nid), Orientation::min);
}

}  // namespace
}  // namespace cvbench
