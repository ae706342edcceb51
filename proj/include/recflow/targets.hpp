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

#ifndef RECFLOW_TARGETS_HPP
#define RECFLOW_TARGETS_HPP

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"

namespace recflow {

/// Per-item target indegrees. `counts` are the rounded integers the flow
/// models consume; `real` keeps the pre-rounding values for reporting and
/// blending. Sum of counts always equals the display total it was built for.
struct TargetDistribution {
  std::vector<long long> counts;
  std::vector<double> real;

  long long total() const {
    return std::accumulate(counts.begin(), counts.end(), 0LL);
  }
};

/// Rounds a nonnegative real vector to integers preserving `total` exactly:
/// floor everything, then hand the leftover units to the largest remainders,
/// ties broken by ascending index.
inline std::vector<long long> largest_remainder_round(const std::vector<double>& real,
                                                      long long total) {
  std::vector<long long> counts(real.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(real.size());
  long long assigned = 0;
  for (std::size_t j = 0; j < real.size(); ++j) {
    const double value = std::max(real[j], 0.0);
    const long long floor_value = static_cast<long long>(std::floor(value));
    counts[j] = floor_value;
    assigned += floor_value;
    remainders.emplace_back(value - static_cast<double>(floor_value), j);
  }
  long long leftover = total - assigned;
  if (leftover < 0) {
    // Floors can overshoot only if the real vector summed above `total`.
    throw DataError("target rounding: real vector exceeds requested total");
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const std::pair<double, std::size_t>& a,
               const std::pair<double, std::size_t>& b) {
              return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
  for (std::size_t pick = 0; leftover > 0; ++pick) {
    if (pick == remainders.size()) {
      throw DataError("target rounding: cannot place leftover units");
    }
    ++counts[remainders[pick].second];
    --leftover;
  }
  return counts;
}

/// Every item gets total_display/r, rounded.
inline TargetDistribution uniform_target(const CandidateGraph& g) {
  const long long total = g.total_display();
  TargetDistribution t;
  t.real.assign(static_cast<std::size_t>(g.item_count),
                g.item_count > 0 ? static_cast<double>(total) / g.item_count : 0.0);
  t.counts = largest_remainder_round(t.real, total);
  return t;
}

/// Supergraph indegree distribution rescaled to the display total.
inline TargetDistribution proportional_target(const CandidateGraph& g) {
  if (g.edges.empty()) throw DataError("proportional target needs a nonempty graph");
  const long long total = g.total_display();
  const std::vector<long long> deg = g.supergraph_indegrees();
  const long long deg_total = std::accumulate(deg.begin(), deg.end(), 0LL);
  TargetDistribution t;
  t.real.resize(deg.size());
  for (std::size_t j = 0; j < deg.size(); ++j) {
    t.real[j] = static_cast<double>(deg[j]) * static_cast<double>(total) /
                static_cast<double>(deg_total);
  }
  t.counts = largest_remainder_round(t.real, total);
  return t;
}

/// Convex blend alpha*f + (1-alpha)*p of two real target vectors that sum
/// to the same total; alpha=1 reproduces rounded f, alpha=0 rounded p.
inline TargetDistribution blend_target(const TargetDistribution& f,
                                       const TargetDistribution& p, double alpha,
                                       long long total) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DataError("blend alpha must lie in [0,1]");
  }
  if (f.real.size() != p.real.size()) {
    throw DataError("blend operands have different lengths");
  }
  TargetDistribution t;
  t.real.resize(f.real.size());
  for (std::size_t j = 0; j < f.real.size(); ++j) {
    t.real[j] = alpha * f.real[j] + (1.0 - alpha) * p.real[j];
  }
  t.counts = largest_remainder_round(t.real, total);
  return t;
}

/// L1 distance between realized indegrees and a target.
inline long long discrepancy_of(const std::vector<long long>& indegrees,
                                const TargetDistribution& target) {
  long long total = 0;
  for (std::size_t j = 0; j < indegrees.size(); ++j) {
    total += std::llabs(indegrees[j] - target.counts[j]);
  }
  return total;
}

/// Diagnostic distance between two targets: half the L1 difference,
/// normalized by twice the shared total.
inline double target_discrepancy(const TargetDistribution& a,
                                 const TargetDistribution& b) {
  long long l1 = 0;
  for (std::size_t j = 0; j < a.counts.size(); ++j) {
    l1 += std::llabs(a.counts[j] - b.counts[j]);
  }
  const long long total = a.total();
  return total > 0 ? static_cast<double>(l1) / (2.0 * static_cast<double>(total)) : 0.0;
}

/// Categories partition the items; `minimums[t]` is the least number of
/// recommendations category t must collectively receive.
struct CategorySpec {
  std::vector<int> category_of;        // per item, 0..k-1
  std::vector<long long> minimums;     // per category

  int category_count() const { return static_cast<int>(minimums.size()); }

  void validate(const TargetDistribution& target, long long total_display) const {
    if (category_of.size() != target.counts.size()) {
      throw DataError("category assignment length != item count");
    }
    std::vector<long long> target_sum(minimums.size(), 0);
    for (std::size_t j = 0; j < category_of.size(); ++j) {
      const int c = category_of[j];
      if (c < 0 || c >= category_count()) {
        throw DataError("item " + std::to_string(j) + " has no valid category");
      }
      target_sum[static_cast<std::size_t>(c)] += target.counts[j];
    }
    long long minimum_total = 0;
    for (std::size_t t = 0; t < minimums.size(); ++t) {
      if (minimums[t] < 0) throw DataError("category minimum must be nonnegative");
      if (minimums[t] > target_sum[t]) {
        throw DataError("category " + std::to_string(t) +
                        " minimum exceeds its aggregate target");
      }
      minimum_total += minimums[t];
    }
    if (minimum_total > total_display) {
      throw DataError("category minimums exceed the display total");
    }
  }
};

// --- serialization -------------------------------------------------------

inline void write_target_tsv(const TargetDistribution& t, std::ostream& out) {
  out << "#total=" << t.total() << '\n';
  for (std::size_t j = 0; j < t.counts.size(); ++j) {
    out << j << '\t' << t.counts[j] << '\n';
  }
}

inline TargetDistribution read_target_tsv(std::istream& in) {
  TargetDistribution t;
  std::string line;
  long long declared_total = -1;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (line.rfind("#total=", 0) == 0 && eq != std::string::npos) {
        declared_total = std::stoll(line.substr(eq + 1));
      }
      continue;
    }
    std::istringstream row(line);
    std::size_t item = 0;
    long long count = 0;
    if (!(row >> item >> count)) {
      throw DataError("malformed target row at line " + std::to_string(line_number));
    }
    if (item >= t.counts.size()) t.counts.resize(item + 1, 0);
    t.counts[item] = count;
  }
  t.real.assign(t.counts.begin(), t.counts.end());
  if (declared_total >= 0 && declared_total != t.total()) {
    throw DataError("target file total mismatch");
  }
  return t;
}

}  // namespace recflow

#endif  // RECFLOW_TARGETS_HPP
