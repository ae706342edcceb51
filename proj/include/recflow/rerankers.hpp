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

#ifndef RECFLOW_RERANKERS_HPP
#define RECFLOW_RERANKERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"
#include "recflow/ratings.hpp"

namespace recflow {

/// Maximum-likelihood "already seen" model: p(seen|i) is the fraction of
/// training users who rated item i.
struct SeenModel {
  std::vector<double> p_seen;
};

inline SeenModel make_seen_model(const RatingDataset& train) {
  SeenModel model;
  model.p_seen.assign(train.item_ids.size(), 0.0);
  const double users = static_cast<double>(train.user_ids.size());
  for (std::size_t i = 0; i < train.by_item.size(); ++i) {
    model.p_seen[i] = static_cast<double>(train.by_item[i].size()) / users;
  }
  return model;
}

namespace detail {

// Top-c per user by an arbitrary per-edge score; ties prefer the lower
// item id. Candidates come from the supergraph, so every diversifier is
// compared over the same edge set.
inline SolutionSubgraph select_top(const CandidateGraph& g,
                                   const std::vector<double>& edge_score) {
  require_feasible(g);
  SolutionSubgraph h;
  h.parent = &g;
  h.ranked.assign(static_cast<std::size_t>(g.user_count), {});
  std::vector<int> order;
  for (int u = 0; u < g.user_count; ++u) {
    order.clear();
    for (std::size_t idx = g.offsets[static_cast<std::size_t>(u)];
         idx < g.offsets[static_cast<std::size_t>(u) + 1]; ++idx) {
      order.push_back(static_cast<int>(idx));
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double sa = edge_score[static_cast<std::size_t>(a)];
      const double sb = edge_score[static_cast<std::size_t>(b)];
      if (sa != sb) return sa > sb;
      return g.edges[static_cast<std::size_t>(a)].item <
             g.edges[static_cast<std::size_t>(b)].item;
    });
    const int take = g.display[static_cast<std::size_t>(u)];
    for (int slot = 0; slot < take; ++slot) {
      h.ranked[static_cast<std::size_t>(u)].push_back(order[static_cast<std::size_t>(slot)]);
      h.chosen.push_back(order[static_cast<std::size_t>(slot)]);
    }
  }
  std::sort(h.chosen.begin(), h.chosen.end());
  check_solution_degrees(h);
  return h;
}

}  // namespace detail

/// Undiversified baseline: top-c by predicted relevance.
inline SolutionSubgraph rerank_top(const CandidateGraph& g) {
  std::vector<double> score(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) score[e] = g.edges[e].weight;
  return detail::select_top(g, score);
}

/// Popularity-complement reranking: score = (rel + (1 - p_seen)) / 2.
inline SolutionSubgraph rerank_pc(const CandidateGraph& g, const SeenModel& seen) {
  std::vector<double> score(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double novelty = 1.0 - seen.p_seen[static_cast<std::size_t>(g.edges[e].item)];
    score[e] = (g.edges[e].weight + novelty) / 2.0;
  }
  return detail::select_top(g, score);
}

/// Free-discovery reranking: novelty -log2(p_seen) is min-max normalized
/// across items before averaging with relevance, so both summands share
/// the [0,1] scale. Unseen items get the floor p = 1/(2|U|).
inline SolutionSubgraph rerank_fd(const CandidateGraph& g, const SeenModel& seen,
                                  std::size_t user_population) {
  const double floor_p = 1.0 / (2.0 * static_cast<double>(user_population));
  std::vector<double> novelty(seen.p_seen.size());
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < seen.p_seen.size(); ++i) {
    novelty[i] = -std::log2(std::max(seen.p_seen[i], floor_p));
    if (i == 0) {
      lo = hi = novelty[i];
    } else {
      lo = std::min(lo, novelty[i]);
      hi = std::max(hi, novelty[i]);
    }
  }
  for (double& n : novelty) {
    n = hi > lo ? (n - lo) / (hi - lo) : 0.0;
  }
  std::vector<double> score(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    score[e] = (g.edges[e].weight + novelty[static_cast<std::size_t>(g.edges[e].item)]) / 2.0;
  }
  return detail::select_top(g, score);
}

/// Bayes-rule reranking: rel_BR(u,i) = rel(u,i) * (sum_u' rel(u',i))^-alpha.
/// The damping factor depends only on the item, so popular items sink.
/// Items whose score sum is zero are excluded from the ranking.
inline SolutionSubgraph rerank_bayes(const CandidateGraph& g, double alpha) {
  if (alpha < 0.0) throw DataError("bayes reranking needs alpha >= 0");
  std::vector<double> score_sum(static_cast<std::size_t>(g.item_count), 0.0);
  for (const CandidateEdge& e : g.edges) {
    score_sum[static_cast<std::size_t>(e.item)] += e.weight;
  }
  std::vector<double> score(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double sum = score_sum[static_cast<std::size_t>(g.edges[e].item)];
    score[e] = sum > 0.0
                   ? g.edges[e].weight * std::pow(sum, -alpha)
                   : -1.0;  // excluded: ranks below every real score
  }
  return detail::select_top(g, score);
}

}  // namespace recflow

#endif  // RECFLOW_RERANKERS_HPP
