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

#ifndef RECFLOW_GREEDY_HPP
#define RECFLOW_GREEDY_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"
#include "recflow/targets.hpp"

namespace recflow {

struct GreedyConfig {
  std::vector<double> q_grid{1.5, 2.0, 4.0, 8.0, 16.0, 32.0};
  std::uint64_t seed = 0;
  double slack = 0.10;  // sweep keeps solutions within (1+slack) of the best discrepancy
};

namespace detail {

// Weighted pick proportional to rel^q. Zero relevance gets a tiny floor
// so the sampler stays well-defined.
template <typename Rng>
int sample_weighted(const std::vector<int>& pool, const CandidateGraph& g, double q,
                    Rng& rng, std::vector<double>& scratch) {
  scratch.clear();
  double total = 0.0;
  for (int e : pool) {
    const double base = std::max(g.edges[static_cast<std::size_t>(e)].weight, 1e-9);
    total += std::pow(base, q);
    scratch.push_back(total);
  }
  const double draw = uniform_unit(rng) * total;
  const auto it = std::upper_bound(scratch.begin(), scratch.end(), draw);
  std::size_t pick = static_cast<std::size_t>(it - scratch.begin());
  if (pick >= pool.size()) pick = pool.size() - 1;
  return pool[pick];
}

}  // namespace detail

/// One run of the stochastic greedy diversifier. Round j gives every user
/// (in ascending id order) their j-th recommendation, sampling with
/// probability proportional to rel^q from the discrepancy-reducing
/// candidates when any exist, otherwise from all remaining candidates.
inline SolutionSubgraph greedy_once(const CandidateGraph& g, const TargetDistribution& t,
                                    double q, std::uint64_t seed) {
  if (!(q > 1.0)) throw DataError("greedy exponent q must exceed 1");
  require_feasible(g);
  std::mt19937_64 rng(seed);
  std::vector<char> taken(g.edges.size(), false);
  std::vector<long long> indegree(static_cast<std::size_t>(g.item_count), 0);
  SolutionSubgraph h;
  h.parent = &g;

  int max_rounds = 0;
  for (int c : g.display) max_rounds = std::max(max_rounds, c);
  std::vector<int> reducing, remaining;
  std::vector<double> scratch;
  for (int round = 0; round < max_rounds; ++round) {
    for (int u = 0; u < g.user_count; ++u) {
      if (round >= g.display[static_cast<std::size_t>(u)]) continue;
      reducing.clear();
      remaining.clear();
      for (std::size_t idx = g.offsets[static_cast<std::size_t>(u)];
           idx < g.offsets[static_cast<std::size_t>(u) + 1]; ++idx) {
        if (taken[idx]) continue;
        remaining.push_back(static_cast<int>(idx));
        if (indegree[static_cast<std::size_t>(g.edges[idx].item)] <
            t.counts[static_cast<std::size_t>(g.edges[idx].item)]) {
          reducing.push_back(static_cast<int>(idx));
        }
      }
      const std::vector<int>& pool = reducing.empty() ? remaining : reducing;
      if (pool.empty()) {
        throw InfeasibleError("greedy exhausted candidates for user " + std::to_string(u));
      }
      const int edge = detail::sample_weighted(pool, g, q, rng, scratch);
      taken[static_cast<std::size_t>(edge)] = true;
      ++indegree[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(edge)].item)];
      h.chosen.push_back(edge);
    }
  }
  std::sort(h.chosen.begin(), h.chosen.end());
  h.rank_by_weight();
  check_solution_degrees(h);
  return h;
}

/// Runs greedy_once across the q grid (one derived seed per entry) and
/// returns, among the runs whose discrepancy is within (1+slack) of the
/// best seen, the one with the highest total relevance; ties prefer lower
/// discrepancy, then lower q.
inline SolutionSubgraph greedy_sweep(const CandidateGraph& g, const TargetDistribution& t,
                                     const GreedyConfig& cfg) {
  if (cfg.q_grid.empty()) throw DataError("greedy sweep needs a nonempty q grid");
  struct Run {
    SolutionSubgraph solution;
    long long discrepancy;
    Fixed relevance_fp;
    double q;
  };
  std::vector<Run> runs;
  runs.reserve(cfg.q_grid.size());
  for (std::size_t i = 0; i < cfg.q_grid.size(); ++i) {
    Run run;
    run.q = cfg.q_grid[i];
    run.solution = greedy_once(g, t, run.q, mix_seed(cfg.seed, i));
    run.discrepancy = discrepancy_of(indegree_vector(run.solution), t);
    run.relevance_fp = run.solution.total_relevance_fp();
    runs.push_back(std::move(run));
  }
  long long best_discrepancy = runs.front().discrepancy;
  for (const Run& run : runs) best_discrepancy = std::min(best_discrepancy, run.discrepancy);
  const double bound = (1.0 + cfg.slack) * static_cast<double>(best_discrepancy);
  const Run* winner = nullptr;
  for (const Run& run : runs) {
    if (static_cast<double>(run.discrepancy) > bound) continue;
    if (winner == nullptr || run.relevance_fp > winner->relevance_fp ||
        (run.relevance_fp == winner->relevance_fp &&
         (run.discrepancy < winner->discrepancy ||
          (run.discrepancy == winner->discrepancy && run.q < winner->q)))) {
      winner = &run;
    }
  }
  return winner->solution;
}

}  // namespace recflow

#endif  // RECFLOW_GREEDY_HPP
