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

#ifndef CVBENCH_EVALUATION_HPP
#define CVBENCH_EVALUATION_HPP

#include "cvbench/clustering.hpp"
#include "cvbench/core.hpp"
#include "cvbench/external_indexes.hpp"
#include "cvbench/internal_indexes.hpp"
#include "cvbench/parallel.hpp"
#include "cvbench/stats.hpp"
#include "cvbench/supervised.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

/**
 * @file evaluation.hpp
 * @brief The three evaluation scenarios: varied-k sweeps, fixed-k candidate
 * sets and supervised ranked sets, each scored by Top-Pick agreement and
 * Spearman correlation against a reference ranking.
 */

namespace cvbench {

/// Candidates for one (dataset, source) pair together with their reference ranking.
struct PartitionCollection {
  std::string dataset_id;
  std::string source;
  std::vector<Partition> partitions;
  std::vector<ExternalScores> external;
  std::vector<double> reference_ranks;  ///< 1 = best
};

/// Scores every partition against the truth and ranks them by the aggregated external ranking.
inline PartitionCollection make_collection(std::string dataset_id, std::string source, std::span<const Label> truth,
                                           std::vector<Partition> partitions) {
  PartitionCollection c;
  c.dataset_id = std::move(dataset_id);
  c.source = std::move(source);
  c.partitions = std::move(partitions);
  for (const auto& p : c.partitions) c.external.push_back(external_scores(truth, p.labels));
  c.reference_ranks = aggregate_external_ranks(c.external);
  return c;
}

/// Collection whose reference ranking is given by construction (scenario 3).
inline PartitionCollection make_collection(std::string dataset_id, std::span<const Label> truth,
                                           const RankedPartitionSet& set) {
  PartitionCollection c;
  c.dataset_id = std::move(dataset_id);
  c.source = to_string(set.variant);
  c.partitions = set.partitions;
  for (const auto& p : c.partitions) c.external.push_back(external_scores(truth, p.labels));
  c.reference_ranks = set.reference_ranks;
  return c;
}

struct FilterDecision {
  bool accepted = false;
  double max_ari = 0.0;
};

inline constexpr double kAriThreshold = 0.6;

/// Accepts a collection when at least one partition reaches ARI >= threshold against the truth.
inline FilterDecision filter_collection(const PartitionCollection& c, double threshold = kAriThreshold) {
  constexpr auto ari = static_cast<std::size_t>(ExternalIndex::ari);
  FilterDecision d;
  d.max_ari = -1.0;
  for (const auto& e : c.external) d.max_ari = std::max(d.max_ari, e[ari]);
  d.accepted = !c.external.empty() && d.max_ari >= threshold;
  return d;
}

/**
 * @brief Position of the best entry among `candidates`.
 *
 * Best means largest under Orientation::max and smallest under
 * Orientation::min. Ties go to the partition with the lowest k, then the
 * lowest position.
 */
inline std::size_t select_best(std::span<const double> values, Orientation orientation, std::span<const int> ks,
                               std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw Error("select_best: no candidates");
  std::size_t best = candidates.front();
  for (auto i : candidates.subspan(1)) {
    const bool better = orientation == Orientation::max ? values[i] > values[best] : values[i] < values[best];
    const bool tied = values[i] == values[best];
    if (better || (tied && (ks[i] < ks[best] || (ks[i] == ks[best] && i < best)))) best = i;
  }
  return best;
}

inline std::vector<int> cluster_counts(const PartitionCollection& c) {
  std::vector<int> ks;
  for (const auto& p : c.partitions) ks.push_back(p.k);
  return ks;
}

/// The Top Pick: reference rank 1, ties broken by the shared rule.
inline std::size_t reference_top_pick(const PartitionCollection& c) {
  std::vector<std::size_t> all(c.partitions.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto ks = cluster_counts(c);
  return select_best(c.reference_ranks, Orientation::min, ks, all);
}

/// True iff the index's best partition (among those with a value) is the reference Top Pick.
inline bool top_pick_agreement(const PartitionCollection& c, std::span<const std::optional<double>> scores,
                               Orientation orientation) {
  std::vector<double> values(scores.size(), 0.0);
  std::vector<std::size_t> defined;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i]) {
      values[i] = *scores[i];
      defined.push_back(i);
    }
  }
  if (defined.empty()) return false;
  const auto ks = cluster_counts(c);
  return select_best(values, orientation, ks, defined) == reference_top_pick(c);
}

struct RegionCorrelations {
  std::optional<double> rho_all;
  std::optional<double> rho_under;
  std::optional<double> rho_over;
  std::optional<double> range;  ///< max - min of the defined correlations
};

inline constexpr std::size_t kMinRegionSize = 3;

/**
 * @brief Spearman correlation between index ranks and reference ranks over
 * all partitions, over those with k < k_O and over those with k > k_O.
 *
 * Partitions without an index value are left out. A region with fewer than
 * three partitions, or with constant ranks on either side, has no value.
 */
inline RegionCorrelations region_correlations(const PartitionCollection& c, std::span<const std::optional<double>> scores,
                                              Orientation orientation, int k_o) {
  auto corr = [&](auto keep) -> std::optional<double> {
    std::vector<double> idx, ref;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!scores[i] || !keep(c.partitions[i].k)) continue;
      idx.push_back(*scores[i]);
      ref.push_back(c.reference_ranks[i]);
    }
    if (idx.size() < kMinRegionSize) return std::nullopt;
    return stats::spearman_rho(average_ranks(idx, orientation), average_ranks(ref, Orientation::min));
  };
  RegionCorrelations out;
  out.rho_all = corr([](int) { return true; });
  out.rho_under = corr([&](int k) { return k < k_o; });
  out.rho_over = corr([&](int k) { return k > k_o; });
  std::vector<double> defined;
  for (const auto& r : {out.rho_all, out.rho_under, out.rho_over}) {
    if (r) defined.push_back(*r);
  }
  if (!defined.empty()) {
    const auto [lo, hi] = std::minmax_element(defined.begin(), defined.end());
    out.range = *hi - *lo;
  }
  return out;
}

struct EvaluationRecord {
  int scenario = 1;
  std::string dataset_id;
  std::string group;   ///< algorithm (scenario 1), target (scenario 2) or variant (scenario 3)
  std::string source;
  std::string index;
  bool external = false;
  bool top_pick_hit = false;
  int k_o = 0;
  std::size_t partitions = 0;
  std::optional<double> rho_all, rho_under, rho_over, range;
  PropertyTags tags;
};

struct RejectRecord {
  int scenario = 1;
  std::string dataset_id;
  std::string group;
  std::string reason;
  std::optional<double> max_ari;  ///< set for ARI-filter rejections
};

struct ScenarioResult {
  std::vector<EvaluationRecord> records;
  std::vector<RejectRecord> rejects;
  std::size_t accepted_collections = 0;
  std::size_t excluded_cells = 0;  ///< (collection, index) cells with too many undefined values

  void append(ScenarioResult&& other) {
    records.insert(records.end(), std::make_move_iterator(other.records.begin()),
                   std::make_move_iterator(other.records.end()));
    rejects.insert(rejects.end(), std::make_move_iterator(other.rejects.begin()),
                   std::make_move_iterator(other.rejects.end()));
    accepted_collections += other.accepted_collections;
    excluded_cells += other.excluded_cells;
  }
};

struct EvalSpec {
  std::vector<InternalIndex> indexes = all_internal_indexes();
  std::vector<Algorithm> algorithms{kAlgorithms.begin(), kAlgorithms.end()};
  int kmeans_restarts = 1;
  int kmeans_runs = 10;    ///< scenario 2
  int fixed_k_runs = 5;    ///< scenario 3 fixed-k variants
  int min_unique = 4;      ///< scenario 2 diversity floor
  double ari_threshold = kAriThreshold;
  double missing_limit = 0.2;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Adjusted index values per partition; nullopt where the index is undefined.
inline std::vector<std::vector<std::optional<double>>> internal_scores(const IndexContext& ctx,
                                                                       const std::vector<Partition>& partitions,
                                                                       const std::vector<InternalIndex>& indexes) {
  std::vector<std::vector<std::optional<double>>> out(indexes.size(),
                                                      std::vector<std::optional<double>>(partitions.size()));
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    PartitionEvaluator ev(ctx, partitions[p]);
    for (std::size_t i = 0; i < indexes.size(); ++i) {
      if (auto s = ev.try_score(indexes[i])) out[i][p] = s->adjusted;
    }
  }
  return out;
}

namespace detail {

inline EvaluationRecord score_cell(const PartitionCollection& c, std::span<const std::optional<double>> scores,
                                   Orientation orientation, int k_o) {
  EvaluationRecord r;
  r.dataset_id = c.dataset_id;
  r.source = c.source;
  r.partitions = c.partitions.size();
  r.k_o = k_o;
  r.top_pick_hit = top_pick_agreement(c, scores, orientation);
  const auto rc = region_correlations(c, scores, orientation, k_o);
  r.rho_all = rc.rho_all;
  r.rho_under = rc.rho_under;
  r.rho_over = rc.rho_over;
  r.range = rc.range;
  return r;
}

/// Records for every requested internal index on one accepted collection.
inline ScenarioResult evaluate_collection(int scenario, const std::string& group, const Dataset& ds,
                                          const IndexContext& ctx, const PartitionCollection& c, const EvalSpec& spec,
                                          bool with_external) {
  ScenarioResult out;
  out.accepted_collections = 1;
  const int k_o = c.partitions[reference_top_pick(c)].k;
  const auto scores = internal_scores(ctx, c.partitions, spec.indexes);
  for (std::size_t i = 0; i < spec.indexes.size(); ++i) {
    const auto missing = static_cast<double>(std::count(scores[i].begin(), scores[i].end(), std::nullopt));
    if (missing > spec.missing_limit * static_cast<double>(c.partitions.size())) {
      ++out.excluded_cells;
      continue;
    }
    auto r = score_cell(c, scores[i], descriptor(spec.indexes[i]).orientation, k_o);
    r.scenario = scenario;
    r.group = group;
    r.index = to_string(spec.indexes[i]);
    r.tags = ds.meta;
    out.records.push_back(std::move(r));
  }
  if (with_external) {
    for (std::size_t e = 0; e < kExternalIndexes.size(); ++e) {
      std::vector<std::optional<double>> col;
      for (const auto& s : c.external) col.emplace_back(s[e]);
      auto r = score_cell(c, col, orientation(kExternalIndexes[e]), k_o);
      r.scenario = scenario;
      r.group = group;
      r.index = to_string(kExternalIndexes[e]);
      r.external = true;
      r.tags = ds.meta;
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

inline std::uint64_t dataset_seed(std::uint64_t suite_seed, const std::string& id) {
  return derive_seed(suite_seed, fnv1a(id));
}

template <typename PerDataset>
ScenarioResult run_over_datasets(const std::vector<Dataset>& datasets, const EvalSpec& spec, PerDataset&& fn) {
  std::vector<ScenarioResult> parts(datasets.size());
  parallel_for(datasets.size(), spec.jobs, [&](std::size_t i) {
    try {
      parts[i] = fn(datasets[i]);
    } catch (const Error& e) {
      throw Error("dataset '" + datasets[i].id + "': " + e.what());
    }
  });
  ScenarioResult out;
  for (auto& p : parts) out.append(std::move(p));
  return out;
}

}  // namespace detail

/// Candidate partitions of one dataset for one scenario, before any filtering.
struct NamedCollection {
  std::string group;
  std::vector<Partition> partitions;
  std::vector<double> reference_ranks;  ///< construction order (scenario 3); empty otherwise
  std::vector<std::string> warnings;
};

/// Scenario 1 candidates: one collection per algorithm over k = 2..k_max.
inline std::vector<NamedCollection> scenario1_candidates(const Dataset& ds, const EvalSpec& spec) {
  SweepSpec sweep;
  sweep.k_max = compute_k_max(ds.truth.k_star);
  sweep.algorithms = spec.algorithms;
  sweep.kmeans_restarts = spec.kmeans_restarts;
  std::vector<NamedCollection> out;
  for (auto& [algo, partitions] : sweep_varied_k(ds.points, sweep, detail::dataset_seed(spec.seed, ds.id))) {
    out.push_back({to_string(algo), std::move(partitions), {}, {}});
  }
  return out;
}

struct Scenario2Target {
  std::string label;  ///< "k*", "under" or "over"
  int k = 0;
};

/// k*, round(0.7 k*) (at least 2) and round(1.3 k*) (at most N - 1); shifted targets equal to k* are dropped.
inline std::vector<Scenario2Target> scenario2_targets(int k_star, std::size_t n) {
  std::vector<Scenario2Target> out{{"k*", k_star}};
  const int under = std::max(2, static_cast<int>((7 * k_star + 5) / 10));
  const int over = std::min(static_cast<int>(n) - 1, static_cast<int>((13 * k_star + 5) / 10));
  if (under != k_star) out.push_back({"under", under});
  if (over != k_star && over != under) out.push_back({"over", over});
  return out;
}

/// Scenario 2 candidates: per target k, seeded K-Means runs plus one cut per linkage, deduplicated.
inline std::vector<NamedCollection> scenario2_candidates(const Dataset& ds, const EvalSpec& spec) {
  const auto seed = detail::dataset_seed(spec.seed, ds.id);
  std::vector<NamedCollection> out;
  for (const auto& t : scenario2_targets(ds.truth.k_star, ds.size())) {
    if (t.k < 2 || t.k >= static_cast<int>(ds.size())) continue;
    out.push_back({t.label,
                   fixed_k_candidates(ds.points, t.k, derive_seed(seed, static_cast<std::uint64_t>(t.k)), spec.kmeans_runs),
                   {},
                   {}});
  }
  return out;
}

/// The four ranked sets of scenario 3; fixed-k targets follow the scenario 2 rule.
inline std::vector<RankedPartitionSet> scenario3_sets(const Dataset& ds, int fixed_runs) {
  std::vector<RankedPartitionSet> sets;
  const int k_star = ds.truth.k_star;
  sets.push_back(procedure1_varied(ds));
  sets.push_back(procedure2_varied(ds));
  const int under = std::max(2, static_cast<int>((7 * k_star + 5) / 10));
  const int over = std::min(static_cast<int>(ds.size()) - 1, static_cast<int>((13 * k_star + 5) / 10));
  if (under < k_star) sets.push_back(procedure_fixed_k(ds, SupervisedVariant::p1_fixed, under, fixed_runs));
  if (over > k_star) sets.push_back(procedure_fixed_k(ds, SupervisedVariant::p2_fixed, over, fixed_runs));
  return sets;
}

inline bool scenario3_eligible(const Dataset& ds) {
  return count_noise(ds.truth.labels) == 0 && ds.meta.distribution == Distribution::gaussian;
}

inline std::vector<NamedCollection> scenario3_candidates(const Dataset& ds, const EvalSpec& spec) {
  std::vector<NamedCollection> out;
  if (!scenario3_eligible(ds)) return out;
  for (auto& set : scenario3_sets(ds, spec.fixed_k_runs)) {
    out.push_back({to_string(set.variant), std::move(set.partitions), std::move(set.reference_ranks), std::move(set.warnings)});
  }
  return out;
}

inline std::vector<NamedCollection> scenario_candidates(int scenario, const Dataset& ds, const EvalSpec& spec) {
  switch (scenario) {
    case 1: return scenario1_candidates(ds, spec);
    case 2: return scenario2_candidates(ds, spec);
    case 3: return scenario3_candidates(ds, spec);
    default: throw Error("unknown scenario " + std::to_string(scenario));
  }
}

/**
 * @brief Scores the candidate collections of one dataset.
 *
 * Scenarios 1 and 2 rank candidates by the aggregated external ranking and
 * drop collections whose best ARI is below the threshold; scenario 2 also
 * drops collections with fewer than spec.min_unique partitions. Scenario 3
 * uses the construction order, needs at least five partitions and also
 * records each external index against that order.
 */
inline ScenarioResult evaluate_collections(int scenario, const Dataset& ds, const std::vector<NamedCollection>& collections,
                                           const EvalSpec& spec) {
  ScenarioResult out;
  if (scenario == 3 && !scenario3_eligible(ds)) {
    out.rejects.push_back({3, ds.id, "all", "needs gaussian, noise-free data", std::nullopt});
    return out;
  }
  std::optional<IndexContext> ctx;
  for (const auto& nc : collections) {
    if (scenario == 3) {
      if (nc.partitions.size() < kMinRankedPartitions) {
        out.rejects.push_back({3, ds.id, nc.group, "fewer than 5 partitions (" + std::to_string(nc.partitions.size()) + ")", std::nullopt});
        continue;
      }
      if (nc.reference_ranks.size() != nc.partitions.size()) throw Error("collection " + nc.group + " lacks reference ranks");
      PartitionCollection c;
      c.dataset_id = ds.id;
      c.source = nc.group;
      c.partitions = nc.partitions;
      for (const auto& p : c.partitions) c.external.push_back(external_scores(ds.truth.labels, p.labels));
      c.reference_ranks = nc.reference_ranks;
      if (!ctx) ctx.emplace(ds.points);
      out.append(detail::evaluate_collection(3, nc.group, ds, *ctx, c, spec, true));
      continue;
    }
    if (scenario == 2 && nc.partitions.size() < static_cast<std::size_t>(spec.min_unique)) {
      out.rejects.push_back({2, ds.id, nc.group, "fewer than " + std::to_string(spec.min_unique) + " unique partitions", std::nullopt});
      continue;
    }
    if (nc.partitions.size() < 2) {
      out.rejects.push_back({scenario, ds.id, nc.group, "fewer than 2 partitions", std::nullopt});
      continue;
    }
    const auto c = make_collection(ds.id, nc.group, ds.truth.labels, nc.partitions);
    const auto f = filter_collection(c, spec.ari_threshold);
    if (!f.accepted) {
      out.rejects.push_back({scenario, ds.id, nc.group, "max ARI below threshold", f.max_ari});
      continue;
    }
    if (!ctx) ctx.emplace(ds.points);
    out.append(detail::evaluate_collection(scenario, nc.group, ds, *ctx, c, spec, false));
  }
  return out;
}

inline ScenarioResult evaluate_dataset(int scenario, const Dataset& ds, const EvalSpec& spec) {
  return evaluate_collections(scenario, ds, scenario_candidates(scenario, ds, spec), spec);
}

/// Runs one scenario over a dataset list; results are concatenated in dataset order.
inline ScenarioResult run_scenario(int scenario, const std::vector<Dataset>& datasets, const EvalSpec& spec) {
  return detail::run_over_datasets(datasets, spec, [&](const Dataset& ds) { return evaluate_dataset(scenario, ds, spec); });
}

inline ScenarioResult run_scenario1(const std::vector<Dataset>& datasets, const EvalSpec& spec) {
  return run_scenario(1, datasets, spec);
}
inline ScenarioResult run_scenario2(const std::vector<Dataset>& datasets, const EvalSpec& spec) {
  return run_scenario(2, datasets, spec);
}
inline ScenarioResult run_scenario3(const std::vector<Dataset>& datasets, const EvalSpec& spec) {
  return run_scenario(3, datasets, spec);
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
  int scenario = 1;
  std::string category;  ///< "all", "group=<g>" or a property bucket
  std::string index;
  bool external = false;
  std::size_t records = 0;
  double top_pick_rate = 0.0;
  std::optional<double> mean_rho_all, median_rho_all, mean_rho_under, mean_rho_over, mean_range;
  double rank_top_pick = 0.0;  ///< among indexes of the same kind in the category
  double rank_rho_all = 0.0;
};

namespace detail {

inline std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline std::optional<double> median_of(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Property buckets used for the breakdown tables; a record can fall in several.
inline std::vector<std::string> property_buckets(const PropertyTags& t) {
  std::vector<std::string> b;
  if (t.overlap > 0) b.emplace_back("overlap");
  if (t.imbalance >= 0.5) b.emplace_back("imbalanced");
  if (t.has_noise) b.emplace_back("noise");
  b.emplace_back(t.dimensions <= 25 ? "d_low" : "d_high");
  b.emplace_back(t.k_star <= 10 ? "k_low" : "k_high");
  if (t.compactness != Compactness::random) b.emplace_back(to_string(t.compactness));
  b.emplace_back(to_string(t.distribution));
  return b;
}

/**
 * @brief Per-index aggregates for the whole record set, per group and per
 * property bucket. Rows are ordered by scenario, category, then index order
 * of first appearance, so the output does not depend on processing order.
 */
inline std::vector<SummaryRow> summarize(const std::vector<EvaluationRecord>& records) {
  struct Acc {
    std::size_t n = 0, hits = 0;
    std::vector<double> all, under, over, range;
  };
  using Key = std::tuple<int, std::string, bool, std::string>;
  std::map<Key, Acc> acc;
  std::vector<std::string> index_order;
  for (const auto& r : records) {
    if (std::find(index_order.begin(), index_order.end(), r.index) == index_order.end()) index_order.push_back(r.index);
    std::vector<std::string> cats{"all", "group=" + r.group};
    for (auto& b : property_buckets(r.tags)) cats.push_back(std::move(b));
    for (const auto& cat : cats) {
      auto& a = acc[{r.scenario, cat, r.external, r.index}];
      ++a.n;
      a.hits += r.top_pick_hit ? 1 : 0;
      if (r.rho_all) a.all.push_back(*r.rho_all);
      if (r.rho_under) a.under.push_back(*r.rho_under);
      if (r.rho_over) a.over.push_back(*r.rho_over);
      if (r.range) a.range.push_back(*r.range);
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, a] : acc) {
    SummaryRow row;
    std::tie(row.scenario, row.category, row.external, row.index) = key;
    row.records = a.n;
    row.top_pick_rate = static_cast<double>(a.hits) / static_cast<double>(a.n);
    row.mean_rho_all = detail::mean_of(a.all);
    row.median_rho_all = detail::median_of(a.all);
    row.mean_rho_under = detail::mean_of(a.under);
    row.mean_rho_over = detail::mean_of(a.over);
    row.mean_range = detail::mean_of(a.range);
    rows.push_back(std::move(row));
  }
  auto index_pos = [&](const std::string& name) {
    return std::find(index_order.begin(), index_order.end(), name) - index_order.begin();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.category != b.category) return a.category < b.category;
    if (a.external != b.external) return !a.external;
    return index_pos(a.index) < index_pos(b.index);
  });
  // Ranks within each (scenario, category, kind) block.
  for (std::size_t lo = 0; lo < rows.size();) {
    std::size_t hi = lo;
    while (hi < rows.size() && rows[hi].scenario == rows[lo].scenario && rows[hi].category == rows[lo].category &&
           rows[hi].external == rows[lo].external) {
      ++hi;
    }
    std::vector<double> tp, rho;
    for (std::size_t i = lo; i < hi; ++i) {
      tp.push_back(rows[i].top_pick_rate);
      rho.push_back(rows[i].mean_rho_all.value_or(-2.0));
    }
    const auto rt = average_ranks(tp), rr = average_ranks(rho);
    for (std::size_t i = lo; i < hi; ++i) {
      rows[i].rank_top_pick = rt[i - lo];
      rows[i].rank_rho_all = rr[i - lo];
    }
    lo = hi;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Property association

enum class Property { k_star, dimensions, overlap, imbalance, noise, compactness };

inline std::string to_string(Property p) {
  switch (p) {
    case Property::k_star: return "k_star";
    case Property::dimensions: return "dimensions";
    case Property::overlap: return "overlap";
    case Property::imbalance: return "imbalance";
    case Property::noise: return "noise";
    case Property::compactness: return "compactness";
  }
  return "?";
}

inline constexpr std::array<Property, 6> kProperties = {Property::k_star, Property::dimensions, Property::overlap,
                                                        Property::imbalance, Property::noise, Property::compactness};

struct AssociationResult {
  int scenario = 1;
  std::string index;
  Property property = Property::k_star;
  std::optional<stats::TestResult> test;
};

/**
 * @brief Effect of a dataset property on rho_all, per index.
 *
 * Continuous properties use Spearman; noise (present/absent) and compactness
 * (compact/sparse, random excluded) use Kruskal-Wallis on the two groups.
 */
inline std::vector<AssociationResult> property_association(const std::vector<EvaluationRecord>& records, Property property) {
  std::map<std::pair<int, std::string>, std::vector<const EvaluationRecord*>> by_index;
  std::vector<std::pair<int, std::string>> order;
  for (const auto& r : records) {
    if (r.external || !r.rho_all) continue;
    const auto key = std::make_pair(r.scenario, r.index);
    if (!by_index.count(key)) order.push_back(key);
    by_index[key].push_back(&r);
  }
  std::vector<AssociationResult> out;
  for (const auto& key : order) {
    const auto& rs = by_index[key];
    AssociationResult res{key.first, key.second, property, std::nullopt};
    std::vector<double> perf;
    if (property == Property::noise || property == Property::compactness) {
      std::vector<int> level;
      for (const auto* r : rs) {
        if (property == Property::compactness && r->tags.compactness == Compactness::random) continue;
        level.push_back(property == Property::noise ? r->tags.has_noise : r->tags.compactness == Compactness::sparse);
        perf.push_back(*r->rho_all);
      }
      res.test = stats::binary_association(level, perf);
    } else {
      std::vector<double> value;
      for (const auto* r : rs) {
        switch (property) {
          case Property::k_star: value.push_back(r->tags.k_star); break;
          case Property::dimensions: value.push_back(r->tags.dimensions); break;
          case Property::overlap: value.push_back(r->tags.overlap); break;
          default: value.push_back(r->tags.imbalance); break;
        }
        perf.push_back(*r->rho_all);
      }
      res.test = stats::continuous_association(value, perf);
    }
    out.push_back(std::move(res));
  }
  return out;
}

/// Pairwise Wilcoxon on rho_all between internal indexes, paired by (dataset, group).
struct PairwiseComparison {
  int scenario = 1;
  std::vector<std::string> indexes;
  std::vector<std::vector<stats::TestResult>> tests;
  std::size_t paired_collections = 0;
};

inline PairwiseComparison compare_indexes(const std::vector<EvaluationRecord>& records, int scenario) {
  PairwiseComparison out;
  out.scenario = scenario;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
  for (const auto& r : records) {
    if (r.scenario != scenario || r.external || !r.rho_all) continue;
    if (std::find(out.indexes.begin(), out.indexes.end(), r.index) == out.indexes.end()) out.indexes.push_back(r.index);
    cells[{r.dataset_id, r.group}][r.index] = *r.rho_all;
  }
  std::vector<std::vector<double>> samples(out.indexes.size());
  for (const auto& [key, values] : cells) {
    if (values.size() != out.indexes.size()) continue;  // pair only complete collections
    for (std::size_t i = 0; i < out.indexes.size(); ++i) samples[i].push_back(values.at(out.indexes[i]));
    ++out.paired_collections;
  }
  if (out.indexes.size() >= 2) out.tests = stats::wilcoxon_pairwise(samples);
  return out;
}

}  // namespace cvbench

#endif
