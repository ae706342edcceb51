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

// Brute-force reference implementations the optimizer suites check
// against. Everything here enumerates, nothing here shares code with the
// flow path it certifies.

#ifndef RECFLOW_TESTS_ORACLES_HPP
#define RECFLOW_TESTS_ORACLES_HPP

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "recflow/constructions.hpp"
#include "recflow/graph.hpp"
#include "recflow/min_cost_flow.hpp"
#include "recflow/targets.hpp"

namespace recflow::oracle {

/// Calls `fn` once per feasible subgraph (every way of picking exactly
/// display[u] candidate edges per user), passing the chosen edge indices.
inline void for_each_feasible(const CandidateGraph& g,
                              const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<std::vector<std::vector<int>>> per_user_choices(
      static_cast<std::size_t>(g.user_count));
  for (int u = 0; u < g.user_count; ++u) {
    const int need = g.display[static_cast<std::size_t>(u)];
    const int begin = static_cast<int>(g.offsets[static_cast<std::size_t>(u)]);
    const int end = static_cast<int>(g.offsets[static_cast<std::size_t>(u) + 1]);
    std::vector<int> combo;
    const std::function<void(int)> choose = [&](int next) {
      if (static_cast<int>(combo.size()) == need) {
        per_user_choices[static_cast<std::size_t>(u)].push_back(combo);
        return;
      }
      for (int e = next; e < end; ++e) {
        combo.push_back(e);
        choose(e + 1);
        combo.pop_back();
      }
    };
    choose(begin);
    if (per_user_choices[static_cast<std::size_t>(u)].empty()) return;  // infeasible
  }
  std::vector<int> chosen;
  const std::function<void(int)> walk = [&](int u) {
    if (u == g.user_count) {
      fn(chosen);
      return;
    }
    for (const std::vector<int>& combo : per_user_choices[static_cast<std::size_t>(u)]) {
      chosen.insert(chosen.end(), combo.begin(), combo.end());
      walk(u + 1);
      chosen.resize(chosen.size() - combo.size());
    }
  };
  walk(0);
}

inline long long discrepancy_of_chosen(const CandidateGraph& g,
                                       const std::vector<int>& chosen,
                                       const TargetDistribution& t) {
  std::vector<long long> deg(static_cast<std::size_t>(g.item_count), 0);
  for (int e : chosen) ++deg[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].item)];
  return discrepancy_of(deg, t);
}

inline long long min_discrepancy(const CandidateGraph& g, const TargetDistribution& t) {
  long long best = std::numeric_limits<long long>::max();
  for_each_feasible(g, [&](const std::vector<int>& chosen) {
    best = std::min(best, discrepancy_of_chosen(g, chosen, t));
  });
  return best;
}

/// All subgraphs attaining the minimum discrepancy.
inline std::vector<std::vector<int>> optimal_set(const CandidateGraph& g,
                                                 const TargetDistribution& t) {
  const long long best = oracle::min_discrepancy(g, t);
  std::vector<std::vector<int>> result;
  for_each_feasible(g, [&](const std::vector<int>& chosen) {
    if (discrepancy_of_chosen(g, chosen, t) == best) result.push_back(chosen);
  });
  return result;
}

inline long long max_coverage(const CandidateGraph& g) {
  long long best = 0;
  for_each_feasible(g, [&](const std::vector<int>& chosen) {
    std::vector<char> hit(static_cast<std::size_t>(g.item_count), false);
    for (int e : chosen) {
      hit[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].item)] = true;
    }
    long long covered = 0;
    for (char h : hit) covered += h ? 1 : 0;
    best = std::max(best, covered);
  });
  return best;
}

/// Highest total relevance among the minimum-discrepancy subgraphs.
inline Fixed best_relevance_at_optimum(const CandidateGraph& g,
                                       const TargetDistribution& t) {
  Fixed best = std::numeric_limits<Fixed>::min();
  for (const std::vector<int>& chosen : optimal_set(g, t)) {
    Fixed total = 0;
    for (int e : chosen) total += g.edges[static_cast<std::size_t>(e)].weight_fp;
    best = std::max(best, total);
  }
  return best;
}

/// Highest binary discounted gain among the minimum-discrepancy
/// subgraphs: a user with k relevant picks gains sum_{i<=k} 1/ln(i+1).
inline Fixed best_binary_gain_at_optimum(const CandidateGraph& g,
                                         const TargetDistribution& t,
                                         const std::vector<char>& relevant) {
  Fixed best = std::numeric_limits<Fixed>::min();
  for (const std::vector<int>& chosen : optimal_set(g, t)) {
    std::vector<int> count(static_cast<std::size_t>(g.user_count), 0);
    for (int e : chosen) {
      if (relevant[static_cast<std::size_t>(e)]) {
        ++count[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].user)];
      }
    }
    Fixed total = 0;
    for (int u = 0; u < g.user_count; ++u) {
      for (int i = 1; i <= count[static_cast<std::size_t>(u)]; ++i) {
        total += slot_discount_fp(i);
      }
    }
    best = std::max(best, total);
  }
  return best;
}

/// Highest full discounted gain among minimum-discrepancy subgraphs,
/// maximizing over every per-user assignment of chosen edges to slots.
inline Fixed best_full_gain_at_optimum(const CandidateGraph& g,
                                       const TargetDistribution& t) {
  Fixed best = std::numeric_limits<Fixed>::min();
  for (const std::vector<int>& chosen : optimal_set(g, t)) {
    std::vector<std::vector<int>> per_user(static_cast<std::size_t>(g.user_count));
    for (int e : chosen) {
      per_user[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].user)]
          .push_back(e);
    }
    Fixed total = 0;
    for (auto& edges : per_user) {
      std::sort(edges.begin(), edges.end());
      Fixed user_best = std::numeric_limits<Fixed>::min();
      do {
        Fixed gain = 0;
        for (std::size_t slot = 0; slot < edges.size(); ++slot) {
          gain += discounted_gain_fp(
              g.edges[static_cast<std::size_t>(edges[slot])].weight_fp,
              static_cast<int>(slot) + 1);
        }
        user_best = std::max(user_best, gain);
      } while (std::next_permutation(edges.begin(), edges.end()));
      total += edges.empty() ? 0 : user_best;
    }
    best = std::max(best, total);
  }
  return best;
}

/// Minimum of the category objective sum |deg - a| + sum max(A_i - D_i, 0).
inline long long min_category_objective(const CandidateGraph& g,
                                        const TargetDistribution& t,
                                        const CategorySpec& cats) {
  long long best = std::numeric_limits<long long>::max();
  for_each_feasible(g, [&](const std::vector<int>& chosen) {
    std::vector<long long> deg(static_cast<std::size_t>(g.item_count), 0);
    for (int e : chosen) {
      ++deg[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].item)];
    }
    long long objective = discrepancy_of(deg, t);
    std::vector<long long> received(static_cast<std::size_t>(cats.category_count()), 0);
    for (int j = 0; j < g.item_count; ++j) {
      received[static_cast<std::size_t>(cats.category_of[static_cast<std::size_t>(j)])] +=
          deg[static_cast<std::size_t>(j)];
    }
    for (int c = 0; c < cats.category_count(); ++c) {
      objective += std::max(cats.minimums[static_cast<std::size_t>(c)] -
                                received[static_cast<std::size_t>(c)],
                            0LL);
    }
    best = std::min(best, objective);
  });
  return best;
}

/// Minimum-cost integral flow by enumerating every per-arc flow value;
/// only sane for a handful of arcs with tiny capacities.
inline long long min_cost_flow_by_enumeration(const FlowNetwork& net, bool* feasible) {
  const std::size_t m = net.arcs.size();
  std::vector<long long> flow(m, 0);
  long long best = std::numeric_limits<long long>::max();
  bool found = false;
  const std::function<void(std::size_t)> walk = [&](std::size_t a) {
    if (a == m) {
      std::vector<long long> balance = net.supply;
      long long cost = 0;
      for (std::size_t i = 0; i < m; ++i) {
        balance[static_cast<std::size_t>(net.arcs[i].tail)] -= flow[i];
        balance[static_cast<std::size_t>(net.arcs[i].head)] += flow[i];
        cost += flow[i] * net.arcs[i].cost;
      }
      for (long long b : balance) {
        if (b != 0) return;
      }
      found = true;
      best = std::min(best, cost);
      return;
    }
    for (long long f = net.arcs[a].lower; f <= net.arcs[a].capacity; ++f) {
      flow[a] = f;
      walk(a + 1);
    }
  };
  walk(0);
  if (feasible != nullptr) *feasible = found;
  return best;
}

}  // namespace recflow::oracle

#endif  // RECFLOW_TESTS_ORACLES_HPP
