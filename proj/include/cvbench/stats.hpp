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

#ifndef CVBENCH_STATS_HPP
#define CVBENCH_STATS_HPP

#include "cvbench/core.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

/**
 * @file stats.hpp
 * @brief Non-parametric tests: Spearman, Wilcoxon signed-rank, Kruskal-Wallis.
 */

namespace cvbench::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::string method;
  double adjusted_p = 1.0;

  bool significant(double alpha = 0.05) const { return adjusted_p < alpha; }
};

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

namespace detail {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double normal_two_sided(double z) {
  const boost::math::normal standard;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(standard, std::abs(z))));
}

}  // namespace detail

/// Spearman's rho alone; nullopt for n < 3 or a constant vector.
inline std::optional<double> spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  if (x.size() < 3) return std::nullopt;
  const double rho = detail::pearson(average_ranks(x), average_ranks(y));
  if (std::isnan(rho)) return std::nullopt;
  return rho;
}

/**
 * @brief Spearman rank correlation with a two-sided p-value.
 *
 * The p-value is exact (all n! permutations of the second ranking) for n < 10
 * and uses the Student-t approximation otherwise. Returns nullopt when either
 * vector is constant or when fewer than 3 observations are given.
 */
inline std::optional<Correlation> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double rho = detail::pearson(rx, ry);
  if (std::isnan(rho)) return std::nullopt;

  Correlation out{rho, 1.0, n};
  if (n < 10) {
    // Pearson over a fixed multiset of ranks is affine in sum(rx[i] * ry[perm[i]]).
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    const double observed = std::abs(rho);
    std::uint64_t hits = 0, total = 0;
    std::vector<double> shuffled(n);
    do {
      for (std::size_t i = 0; i < n; ++i) shuffled[i] = ry[perm[i]];
      const double r = detail::pearson(rx, shuffled);
      if (std::abs(r) >= observed - 1e-12) ++hits;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_value = static_cast<double>(hits) / static_cast<double>(total);
  } else {
    if (std::abs(rho) >= 1.0) {
      out.p_value = 0.0;
    } else {
      const double df = static_cast<double>(n) - 2.0;
      const double t = rho * std::sqrt(df / (1.0 - rho * rho));
      const boost::math::students_t dist(df);
      out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
  }
  return out;
}

/**
 * @brief Wilcoxon signed-rank test on paired samples (two-sided).
 *
 * Zero differences are dropped. With fewer than 20 non-zero differences the
 * p-value comes from the exact null distribution of the signed-rank sum
 * (tied ranks included); otherwise a normal approximation with tie and
 * continuity correction is used. The statistic is W+, the sum of ranks of
 * positive differences.
 */
inline TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("wilcoxon: length mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  TestResult res;
  res.n = diffs.size();
  if (diffs.empty()) {
    res.method = "wilcoxon-none";
    res.statistic = 0.0;
    res.p_value = res.adjusted_p = 1.0;
    return res;
  }
  std::vector<double> absd(diffs.size());
  std::transform(diffs.begin(), diffs.end(), absd.begin(), [](double d) { return std::abs(d); });
  const auto ranks = average_ranks(absd, Orientation::min);
  const std::size_t n = diffs.size();

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  res.statistic = w_plus;

  if (n < 20) {
    res.method = "wilcoxon-exact";
    // Doubled ranks are integers, so the null distribution is a subset-sum count.
    std::vector<long> doubled(n);
    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = std::lround(2.0 * ranks[i]);
      total += doubled[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
      for (long s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
      }
      reach += r;
    }
    const long observed = std::lround(2.0 * w_plus);
    // |2s - total| >= |2w - total| compares distances from the null mean exactly.
    const long dev = std::abs(2 * observed - total);
    double hits = 0.0, all = 0.0;
    for (long s = 0; s <= total; ++s) {
      const double c = counts[static_cast<std::size_t>(s)];
      all += c;
      if (std::abs(2 * s - total) >= dev) hits += c;
    }
    res.p_value = std::min(1.0, hits / all);
  } else {
    res.method = "wilcoxon-normal";
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    std::map<double, int> ties;
    for (double r : ranks) ++ties[r];
    for (const auto& [r, t] : ties) var -= (static_cast<double>(t) * t * t - t) / 48.0;
    if (var <= 0.0) {
      res.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
      res.p_value = detail::normal_two_sided(z);
    }
  }
  res.adjusted_p = res.p_value;
  return res;
}

/// min(1, p * m); Bonferroni adjustment for m comparisons.
inline double bonferroni(double p, std::size_t m) { return std::min(1.0, p * static_cast<double>(m)); }

/**
 * @brief All-pairs Wilcoxon signed-rank tests with Bonferroni correction.
 *
 * `samples[i]` holds the paired observations of group i (for example the
 * per-collection correlations of one validity index). Entry (i, j) of the
 * result is the test of samples[i] - samples[j]; the diagonal is left with
 * p = 1.
 */
inline std::vector<std::vector<TestResult>> wilcoxon_pairwise(const std::vector<std::vector<double>>& samples) {
  const std::size_t g = samples.size();
  for (const auto& s : samples) {
    if (s.size() != samples.front().size()) throw Error("wilcoxon_pairwise: samples must be paired");
  }
  const std::size_t m = g * (g - 1) / 2;
  std::vector<std::vector<TestResult>> out(g, std::vector<TestResult>(g));
  for (std::size_t i = 0; i < g; ++i) {
    out[i][i].method = "identity";
    for (std::size_t j = i + 1; j < g; ++j) {
      auto r = wilcoxon_signed_rank(samples[i], samples[j]);
      r.adjusted_p = bonferroni(r.p_value, m);
      out[i][j] = r;
      auto mirrored = r;
      mirrored.statistic = static_cast<double>(r.n) * (static_cast<double>(r.n) + 1.0) / 2.0 - r.statistic;
      out[j][i] = mirrored;
    }
  }
  return out;
}

/**
 * @brief Kruskal-Wallis H test with tie correction; p from chi-square(groups - 1).
 */
inline TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error("kruskal_wallis: at least 2 groups required");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw Error("kruskal_wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto ranks = average_ranks(pooled, Orientation::min);
  const double n = static_cast<double>(pooled.size());

  double sum_term = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rsum += ranks[offset + i];
    sum_term += rsum * rsum / static_cast<double>(g.size());
    offset += g.size();
  }
  double h = 12.0 / (n * (n + 1.0)) * sum_term - 3.0 * (n + 1.0);

  std::map<double, int> ties;
  for (double r : ranks) ++ties[r];
  double tie_sum = 0.0;
  for (const auto& [r, t] : ties) tie_sum += static_cast<double>(t) * t * t - t;
  const double correction = 1.0 - tie_sum / (n * n * n - n);

  TestResult res;
  res.method = "kruskal-wallis";
  res.n = pooled.size();
  if (correction <= 0.0) {
    res.statistic = 0.0;
    res.p_value = res.adjusted_p = 1.0;
    return res;
  }
  h = std::max(0.0, h / correction);
  res.statistic = h;
  const boost::math::chi_squared dist(static_cast<double>(groups.size() - 1));
  res.p_value = h == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, h));
  res.adjusted_p = res.p_value;
  return res;
}

/// Spearman association between a continuous property and a performance measure.
inline std::optional<TestResult> continuous_association(std::span<const double> property,
                                                        std::span<const double> performance) {
  const auto c = spearman(property, performance);
  if (!c) return std::nullopt;
  TestResult r;
  r.statistic = c->rho;
  r.p_value = r.adjusted_p = c->p_value;
  r.n = c->n;
  r.method = "spearman";
  return r;
}

/// Kruskal-Wallis association between a two-level property and a performance measure.
inline std::optional<TestResult> binary_association(std::span<const int> level, std::span<const double> performance) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < level.size(); ++i) (level[i] ? b : a).push_back(performance[i]);
  if (a.empty() || b.empty()) return std::nullopt;
  return kruskal_wallis({a, b});
}

}  // namespace cvbench::stats

#endif
