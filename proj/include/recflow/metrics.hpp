// Copyright 2026 The recflow Authors
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

#ifndef RECFLOW_METRICS_HPP
#define RECFLOW_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"
#include "recflow/targets.hpp"

namespace recflow {

/// The standard sales-diversity panel for one solution: all the @n
/// metrics plus plain and discounted cumulative gain.
struct MetricsReport {
  double discrepancy_normalized = 0.0;  // D@n
  double aggdiv_fraction = 0.0;         // A@n
  double gini_index = 0.0;              // G@n
  double entropy_nats = 0.0;            // E@n, natural log
  double precision = 0.0;               // P@n
  double cg = 0.0;
  double dcg = 0.0;
  int n = 0;
};

/// Normalized discrepancy: sum |deg - a| / (2 * sum c), in [0,1].
inline double discrepancy_at(const SolutionSubgraph& h, const TargetDistribution& t) {
  const long long total_display = h.parent->total_display();
  if (total_display == 0) throw DataError("discrepancy undefined for zero display total");
  return static_cast<double>(discrepancy_of(indegree_vector(h), t)) /
         (2.0 * static_cast<double>(total_display));
}

/// Gini index of an indegree distribution, ascending-sorted form:
/// G = (1/r) * (r + 1 - 2 * sum_i (r+1-i) d_i / sum d), i 1-based.
inline double gini(const std::vector<long long>& indegrees) {
  std::vector<long long> sorted = indegrees;
  std::sort(sorted.begin(), sorted.end());
  long long total = 0;
  long long weighted = 0;
  const long long r = static_cast<long long>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += (r - static_cast<long long>(i)) * sorted[i];  // r+1-(i+1)
  }
  if (total == 0) throw DataError("gini undefined for an all-zero distribution");
  return (static_cast<double>(r) + 1.0 -
          2.0 * static_cast<double>(weighted) / static_cast<double>(total)) /
         static_cast<double>(r);
}

/// Natural-log entropy of the normalized indegree distribution; items
/// with zero indegree contribute nothing.
inline double entropy(const std::vector<long long>& indegrees) {
  long long total = 0;
  for (long long d : indegrees) total += d;
  if (total == 0) throw DataError("entropy undefined for an all-zero distribution");
  double result = 0.0;
  for (long long d : indegrees) {
    if (d == 0) continue;
    const double p = static_cast<double>(d) / static_cast<double>(total);
    result -= p * std::log(p);
  }
  return result;
}

/// Fraction of the shown recommendations present in the held-out
/// relevant set. `test_relevant` must be sorted.
inline double precision_at(const SolutionSubgraph& h,
                           const std::vector<std::pair<int, int>>& test_relevant) {
  const long long total_display = h.parent->total_display();
  if (total_display == 0) return 0.0;
  long long hits = 0;
  for (int e : h.chosen) {
    const CandidateEdge& edge = h.parent->edges[static_cast<std::size_t>(e)];
    hits += std::binary_search(test_relevant.begin(), test_relevant.end(),
                               std::make_pair(edge.user, edge.item))
                ? 1
                : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(total_display);
}

/// Fraction of items that received at least one recommendation.
inline double aggdiv_at(const SolutionSubgraph& h) {
  const std::vector<long long> deg = indegree_vector(h);
  long long covered = 0;
  for (long long d : deg) covered += d >= 1 ? 1 : 0;
  return h.parent->item_count > 0
             ? static_cast<double>(covered) / static_cast<double>(h.parent->item_count)
             : 0.0;
}

/// Cumulative gain: the sum of per-edge gains over all slots.
inline double cumulative_gain(const SolutionSubgraph& h,
                              const std::vector<double>& edge_gain) {
  double total = 0.0;
  for (int e : h.chosen) total += edge_gain[static_cast<std::size_t>(e)];
  return total;
}

/// Discounted cumulative gain with slot i worth gain/ln(i+1); uses the
/// solution's per-user ranking.
inline double dcg(const SolutionSubgraph& h, const std::vector<double>& edge_gain) {
  double total = 0.0;
  for (const auto& slots : h.ranked) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      total += edge_gain[static_cast<std::size_t>(slots[i])] /
               std::log(static_cast<double>(i) + 2.0);
    }
  }
  return total;
}

/// Wilcoxon signed-rank over paired samples: drops zero differences,
/// averages tied ranks, and returns (min(W+, W-), one-sided p). Exact
/// tail enumeration up to n = 25, normal approximation beyond.
inline std::pair<double, double> signed_rank(const std::vector<double>& a,
                                             const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("signed rank needs equal-length samples");
  std::vector<std::pair<double, int>> magnitude;  // (|diff|, sign)
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = b[i] - a[i];
    if (diff != 0.0) magnitude.emplace_back(std::abs(diff), diff > 0.0 ? 1 : -1);
  }
  const std::size_t n = magnitude.size();
  if (n == 0) return {0.0, 1.0};
  std::sort(magnitude.begin(), magnitude.end());
  // Doubled ranks keep tie-averaged values integral.
  std::vector<long long> rank2(n, 0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && magnitude[j].first == magnitude[i].first) ++j;
    const long long doubled = static_cast<long long>(i + 1 + j);  // 2 * average rank
    for (std::size_t k = i; k < j; ++k) rank2[k] = doubled;
    i = j;
  }
  long long w_plus2 = 0, w_minus2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (magnitude[i].second > 0 ? w_plus2 : w_minus2) += rank2[i];
  }
  const long long w_min2 = std::min(w_plus2, w_minus2);
  const double statistic = static_cast<double>(w_min2) / 2.0;

  double p = 1.0;
  if (n <= 25) {
    // dp[w] = number of sign assignments with doubled rank sum w.
    long long sum2 = 0;
    for (long long r : rank2) sum2 += r;
    std::vector<unsigned long long> dp(static_cast<std::size_t>(sum2) + 1, 0);
    dp[0] = 1;
    for (long long r : rank2) {
      for (long long w = sum2; w >= r; --w) {
        dp[static_cast<std::size_t>(w)] += dp[static_cast<std::size_t>(w - r)];
      }
    }
    unsigned long long tail = 0;
    for (long long w = 0; w <= w_min2; ++w) tail += dp[static_cast<std::size_t>(w)];
    p = static_cast<double>(tail) / std::pow(2.0, static_cast<double>(n));
  } else {
    const double nn = static_cast<double>(n);
    double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (std::size_t i = 0; i < n;) {  // tie correction
      std::size_t j = i;
      while (j < n && magnitude[j].first == magnitude[i].first) ++j;
      const double t = static_cast<double>(j - i);
      variance -= (t * t * t - t) / 48.0;
      i = j;
    }
    const double mean = nn * (nn + 1.0) / 4.0;
    const double z = (statistic - mean) / std::sqrt(variance);
    p = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  return {statistic, std::min(p, 1.0)};
}

/// Full metric panel for a solution against its target and held-out
/// relevant pairs; gains are the edge weights.
inline MetricsReport evaluate(const SolutionSubgraph& h, const TargetDistribution& t,
                              const std::vector<std::pair<int, int>>& test_relevant,
                              int n) {
  MetricsReport report;
  report.n = n;
  report.discrepancy_normalized = discrepancy_at(h, t);
  report.aggdiv_fraction = aggdiv_at(h);
  const std::vector<long long> deg = indegree_vector(h);
  report.gini_index = gini(deg);
  report.entropy_nats = entropy(deg);
  report.precision = precision_at(h, test_relevant);
  std::vector<double> gains(h.parent->edges.size(), 0.0);
  for (std::size_t e = 0; e < gains.size(); ++e) gains[e] = h.parent->edges[e].weight;
  report.cg = cumulative_gain(h, gains);
  report.dcg = dcg(h, gains);
  return report;
}

}  // namespace recflow

#endif  // RECFLOW_METRICS_HPP
