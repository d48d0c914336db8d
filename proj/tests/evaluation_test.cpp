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

#include "cvbench/datagen.hpp"
#include "cvbench/evaluation.hpp"

namespace cvbench {
namespace {

using Scores = std::vector<std::optional<double>>;

Labels modulo_labels(std::size_t n, int k) {
  Labels l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<Label>(i % static_cast<std::size_t>(k));
  return l;
}

/// Collection of partitions with k = 2..10 and a V-shaped reference ranking centred on k = 5.
PartitionCollection v_collection() {
  PartitionCollection c;
  c.dataset_id = "v";
  for (int k = 2; k <= 10; ++k) {
    c.partitions.push_back(Partition::from_labels(modulo_labels(30, k)));
    c.reference_ranks.push_back(2.0 * std::abs(k - 5) + (k > 5 ? 1.0 : 0.0) + 1.0);
  }
  return c;
}

Dataset gaussian_dataset(int k, int d, std::uint64_t seed) {
  GenConfig g;
  g.k_star = k;
  g.dimensions = d;
  g.min_cluster_size = 30;
  g.max_cluster_size = 40;
  g.seed = seed;
  auto ds = generate_dataset(g);
  ds.id = "g" + std::to_string(k) + "_" + std::to_string(seed);
  return ds;
}

TEST(Filter, GroundTruthAcceptedNoiseRejected) {
  const Labels truth = modulo_labels(60, 3);
  const auto good = make_collection("d", "s", truth, {Partition::from_labels(truth), Partition::from_labels(modulo_labels(60, 2))});
  const auto f = filter_collection(good);
  EXPECT_TRUE(f.accepted);
  EXPECT_EQ(f.max_ari, 1.0);

  std::mt19937_64 rng(60);
  std::vector<Partition> random;
  for (int t = 0; t < 4; ++t) {
    Labels l(60);
    for (auto& v : l) v = static_cast<Label>(rng() % 3);
    random.push_back(Partition::from_labels(l));
  }
  EXPECT_FALSE(filter_collection(make_collection("d", "s", truth, random)).accepted);
}

TEST(Filter, ThresholdIsInclusive) {
  const Labels truth = modulo_labels(40, 4);
  Labels near = truth;
  near[0] = 1;
  near[1] = 2;
  const auto c = make_collection("d", "s", truth, {Partition::from_labels(near), Partition::from_labels(modulo_labels(40, 2))});
  const double best = filter_collection(c).max_ari;
  EXPECT_TRUE(filter_collection(c, best).accepted);
  EXPECT_FALSE(filter_collection(c, std::nextafter(best, 2.0)).accepted);
}

TEST(SelectBest, TieRule) {
  const std::vector<double> v{1.0, 3.0, 3.0, 3.0};
  const std::vector<int> ks{5, 4, 2, 2};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  EXPECT_EQ(select_best(v, Orientation::max, ks, all), 2u);
  EXPECT_EQ(select_best(v, Orientation::min, ks, all), 0u);
  const std::vector<std::size_t> some{1, 3};
  EXPECT_EQ(select_best(v, Orientation::max, ks, some), 3u);
  EXPECT_THROW(select_best(v, Orientation::max, ks, std::vector<std::size_t>{}), Error);
}

TEST(TopPick, SkipsUndefinedValues) {
  const auto c = v_collection();
  EXPECT_EQ(c.partitions[reference_top_pick(c)].k, 5);
  Scores s(c.partitions.size());
  EXPECT_FALSE(top_pick_agreement(c, s, Orientation::max));
  s[3] = 0.5;
  EXPECT_TRUE(top_pick_agreement(c, s, Orientation::max));
  s[0] = 0.9;
  EXPECT_FALSE(top_pick_agreement(c, s, Orientation::max));
  EXPECT_TRUE(top_pick_agreement(c, s, Orientation::min));
}

TEST(RegionCorrelations, PerfectAndReversed) {
  const auto c = v_collection();
  Scores agree, reverse;
  for (double r : c.reference_ranks) {
    agree.emplace_back(-r);
    reverse.emplace_back(r);
  }
  const auto a = region_correlations(c, agree, Orientation::max, 5);
  EXPECT_DOUBLE_EQ(*a.rho_all, 1.0);
  EXPECT_DOUBLE_EQ(*a.rho_under, 1.0);
  EXPECT_DOUBLE_EQ(*a.rho_over, 1.0);
  EXPECT_DOUBLE_EQ(*a.range, 0.0);
  const auto r = region_correlations(c, reverse, Orientation::max, 5);
  EXPECT_DOUBLE_EQ(*r.rho_all, -1.0);
  EXPECT_DOUBLE_EQ(*r.rho_under, -1.0);
  EXPECT_DOUBLE_EQ(*r.rho_over, -1.0);
  // Same values read as smaller-is-better flip every sign.
  EXPECT_DOUBLE_EQ(*region_correlations(c, reverse, Orientation::min, 5).rho_all, 1.0);
}

TEST(RegionCorrelations, IndexFavouringLargeK) {
  const auto c = v_collection();
  Scores grows;
  for (const auto& p : c.partitions) grows.emplace_back(static_cast<double>(p.k));
  const auto r = region_correlations(c, grows, Orientation::max, 5);
  EXPECT_DOUBLE_EQ(*r.rho_under, 1.0);
  EXPECT_DOUBLE_EQ(*r.rho_over, -1.0);
  EXPECT_DOUBLE_EQ(*r.range, 2.0);
}

TEST(RegionCorrelations, SmallOrConstantRegionsHaveNoValue) {
  const auto c = v_collection();
  Scores constant(c.partitions.size(), 0.25);
  const auto r = region_correlations(c, constant, Orientation::max, 5);
  EXPECT_FALSE(r.rho_all);
  EXPECT_FALSE(r.range);
  EXPECT_EQ(c.partitions[select_best(std::vector<double>(9, 0.25), Orientation::max, cluster_counts(c),
                                     std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8})].k,
            2);
  Scores sparse(c.partitions.size());
  sparse[0] = 1.0;
  sparse[1] = 2.0;
  sparse[5] = 3.0;
  sparse[6] = 4.0;
  sparse[7] = 5.0;
  const auto s = region_correlations(c, sparse, Orientation::max, 5);
  EXPECT_FALSE(s.rho_under);
  EXPECT_TRUE(s.rho_over);
}

TEST(ScoreCell, InvariantUnderMonotoneTransform) {
  const auto c = v_collection();
  std::mt19937_64 rng(61);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    Scores s, f;
    for (std::size_t i = 0; i < c.partitions.size(); ++i) {
      const double v = z(rng);
      s.emplace_back(v);
      f.emplace_back(std::exp(v) * 5 + 2);
    }
    const auto a = detail::score_cell(c, s, Orientation::max, 5), b = detail::score_cell(c, f, Orientation::max, 5);
    EXPECT_EQ(a.top_pick_hit, b.top_pick_hit);
    EXPECT_EQ(a.rho_all, b.rho_all);
    EXPECT_EQ(a.rho_under, b.rho_under);
    EXPECT_EQ(a.rho_over, b.rho_over);
  }
}

TEST(Scenario2, Targets) {
  auto ks = [](int k_star, std::size_t n) {
    std::vector<int> out;
    for (const auto& t : scenario2_targets(k_star, n)) out.push_back(t.k);
    return out;
  };
  EXPECT_EQ(ks(10, 500), (std::vector<int>{10, 7, 13}));
  EXPECT_EQ(ks(3, 500), (std::vector<int>{3, 2, 4}));
  EXPECT_EQ(ks(2, 500), (std::vector<int>{2, 3}));
  EXPECT_EQ(ks(20, 22), (std::vector<int>{20, 14, 21}));
}

TEST(Scenario2, CandidatesAreDistinctWithTargetK) {
  const auto ds = gaussian_dataset(5, 2, 62);
  EvalSpec spec;
  spec.seed = 3;
  const auto cands = scenario2_candidates(ds, spec);
  ASSERT_EQ(cands.size(), 3u);
  const int targets[] = {5, 4, 7};
  for (std::size_t t = 0; t < cands.size(); ++t) {
    std::set<Labels> seen;
    for (const auto& p : cands[t].partitions) {
      EXPECT_EQ(p.k, targets[t]);
      EXPECT_TRUE(seen.insert(canonical_form(p)).second);
    }
  }
}

TEST(Scenario1, SeparatedDataIsAcceptedAndDeterministic) {
  const auto ds = gaussian_dataset(3, 2, 63);
  EvalSpec spec;
  spec.indexes = {InternalIndex::silhouette, InternalIndex::vrc};
  spec.algorithms = {Algorithm::average, Algorithm::kmeans};
  spec.seed = 9;
  const auto a = evaluate_dataset(1, ds, spec), b = evaluate_dataset(1, ds, spec);
  EXPECT_EQ(a.accepted_collections, 2u);
  EXPECT_TRUE(a.rejects.empty());
  ASSERT_EQ(a.records.size(), 4u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].index, b.records[i].index);
    EXPECT_EQ(a.records[i].rho_all, b.records[i].rho_all);
    EXPECT_EQ(a.records[i].top_pick_hit, b.records[i].top_pick_hit);
    EXPECT_EQ(a.records[i].partitions, 24u);
    EXPECT_EQ(a.records[i].k_o, 3);
  }
}

TEST(Scenario1, UnstructuredDataIsFiltered) {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u;
  Dataset ds;
  ds.id = "flat";
  ds.points.resize(60, 2);
  for (Eigen::Index i = 0; i < 60; ++i) ds.points.row(i) << u(rng), u(rng);
  Labels l(60);
  for (auto& v : l) v = static_cast<Label>(rng() % 3);
  ds.truth = GroundTruth::from_labels(l);
  EvalSpec spec;
  spec.indexes = {InternalIndex::silhouette};
  spec.algorithms = {Algorithm::single};
  const auto r = evaluate_dataset(1, ds, spec);
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.rejects.size(), 1u);
  ASSERT_TRUE(r.rejects[0].max_ari);
  EXPECT_LT(*r.rejects[0].max_ari, kAriThreshold);
}

TEST(Scenario3, GroundTruthIsAlwaysTheTopPick) {
  EvalSpec spec;
  spec.indexes = {InternalIndex::silhouette};
  std::size_t checked = 0;
  for (std::uint64_t seed = 70; seed < 74; ++seed) {
    const auto r = evaluate_dataset(3, gaussian_dataset(8, 3, seed), spec);
    for (const auto& rec : r.records) {
      if (!rec.external) continue;
      EXPECT_EQ(rec.scenario, 3);
      if (rec.index == "ari" || rec.index == "jaccard" || rec.index == "nmi" || rec.index == "nid") {
        EXPECT_TRUE(rec.top_pick_hit) << rec.dataset_id << " " << rec.group << " " << rec.index;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(Scenario3, NonGaussianDataIsRejected) {
  GenConfig g;
  g.k_star = 6;
  g.distribution = Distribution::uniform;
  g.seed = 65;
  auto ds = generate_dataset(g);
  ds.id = "u";
  EvalSpec spec;
  spec.indexes = {InternalIndex::silhouette};
  const auto r = evaluate_dataset(3, ds, spec);
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].group, "all");
}

EvaluationRecord record(const std::string& index, int k_star, double rho, bool hit, std::string dataset = "d") {
  EvaluationRecord r;
  r.dataset_id = std::move(dataset);
  r.group = "single";
  r.index = index;
  r.top_pick_hit = hit;
  r.rho_all = rho;
  r.tags.k_star = k_star;
  r.tags.dimensions = 2;
  r.tags.compactness = Compactness::random;
  return r;
}

TEST(Summarize, RowsAndRanks) {
  const std::vector<EvaluationRecord> recs{record("sil", 2, 0.5, true), record("sil", 3, 0.7, false),
                                           record("vrc", 2, 0.9, true), record("vrc", 3, 0.9, true)};
  const auto rows = summarize(recs);
  // Categories: all, group=single, d_low, k_low, gaussian; two indexes each.
  ASSERT_EQ(rows.size(), 10u);
  const auto it = std::find_if(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.category == "all" && r.index == "sil"; });
  ASSERT_NE(it, rows.end());
  EXPECT_EQ(it->records, 2u);
  EXPECT_DOUBLE_EQ(it->top_pick_rate, 0.5);
  EXPECT_DOUBLE_EQ(*it->mean_rho_all, 0.6);
  EXPECT_DOUBLE_EQ(it->rank_top_pick, 2.0);
  EXPECT_DOUBLE_EQ(it->rank_rho_all, 2.0);

  auto shuffled = recs;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto again = summarize(shuffled);
  ASSERT_EQ(again.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(again[i].category, rows[i].category);
    EXPECT_EQ(again[i].records, rows[i].records);
  }
}

TEST(Association, RiggedAndConstant) {
  std::vector<EvaluationRecord> recs;
  for (int k = 2; k < 14; ++k) {
    recs.push_back(record("rigged", k, k / 100.0, false, "d" + std::to_string(k)));
    recs.push_back(record("flat", k, 0.3, false, "d" + std::to_string(k)));
  }
  const auto res = property_association(recs, Property::k_star);
  ASSERT_EQ(res.size(), 2u);
  ASSERT_TRUE(res[0].test);
  EXPECT_DOUBLE_EQ(res[0].test->statistic, 1.0);
  EXPECT_TRUE(res[0].test->significant());
  EXPECT_FALSE(res[1].test);
  const auto constant_property = property_association(recs, Property::dimensions);
  EXPECT_FALSE(constant_property[0].test);
}

TEST(CompareIndexes, PairsCompleteCollectionsOnly) {
  std::vector<EvaluationRecord> recs;
  for (int d = 0; d < 8; ++d) {
    recs.push_back(record("a", 2, 0.1 * d, false, "d" + std::to_string(d)));
    recs.push_back(record("b", 2, 0.1 * d + 0.5, false, "d" + std::to_string(d)));
  }
  recs.push_back(record("a", 2, 0.3, false, "lonely"));
  const auto cmp = compare_indexes(recs, 1);
  EXPECT_EQ(cmp.indexes, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(cmp.paired_collections, 8u);
  ASSERT_EQ(cmp.tests.size(), 2u);
  EXPECT_LT(cmp.tests[0][1].p_value, 0.05);
}

}  // namespace
}  // namespace cvbench
