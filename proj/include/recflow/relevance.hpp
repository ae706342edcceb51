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

#ifndef RECFLOW_RELEVANCE_HPP
#define RECFLOW_RELEVANCE_HPP

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"
#include "recflow/ratings.hpp"

namespace recflow {

enum class Provenance { item_based, user_based, random_walk, imported };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::item_based: return "IB";
    case Provenance::user_based: return "UB";
    case Provenance::random_walk: return "RW";
    case Provenance::imported: return "imported";
  }
  return "?";
}

/// Predicted relevance scores over (user, item) pairs absent from the
/// training set. Scores are per-user min-max normalized to [0,1], which
/// preserves each user's ranking; a user with a single candidate maps
/// to 1.0. `scores[u]` is sorted by item id.
struct RelevanceFunction {
  Provenance provenance = Provenance::imported;
  std::vector<std::vector<std::pair<int, double>>> scores;
  int item_count = 0;
};

struct NeighborhoodModel {
  int size = 100;
  // Inverted policy: the neighborhood of x is the set of entities that
  // keep x in *their* top lists, which spreads influence toward the tail.
  bool inverted = false;
};

namespace detail {

inline void normalize_per_user(RelevanceFunction& rel) {
  for (auto& row : rel.scores) {
    if (row.empty()) continue;
    double lo = row.front().second, hi = row.front().second;
    for (const auto& [item, value] : row) {
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    for (auto& [item, value] : row) {
      value = hi > lo ? (value - lo) / (hi - lo) : 1.0;
    }
  }
}

// Top `size` most similar peers per entity over Jaccard of rating
// supports; self excluded, zero similarities dropped, ties by id.
// `support[x]` lists the opposite-side neighbors of x (sorted).
// Returns per-entity neighbor lists as (peer, similarity).
inline std::vector<std::vector<std::pair<int, double>>> jaccard_neighborhoods(
    const std::vector<std::vector<std::pair<int, double>>>& support,
    const std::vector<std::vector<std::pair<int, double>>>& opposite, int size) {
  const std::size_t n = support.size();
  std::vector<std::vector<std::pair<int, double>>> neighborhoods(n);
  std::vector<int> overlap(n, 0);
  std::vector<int> touched;
  for (std::size_t x = 0; x < n; ++x) {
    touched.clear();
    for (const auto& [mid, unused] : support[x]) {
      for (const auto& [y, unused2] : opposite[static_cast<std::size_t>(mid)]) {
        if (static_cast<std::size_t>(y) == x) continue;
        if (overlap[static_cast<std::size_t>(y)] == 0) touched.push_back(y);
        ++overlap[static_cast<std::size_t>(y)];
      }
    }
    auto& list = neighborhoods[x];
    for (int y : touched) {
      const double inter = overlap[static_cast<std::size_t>(y)];
      const double uni = static_cast<double>(support[x].size()) +
                         static_cast<double>(support[static_cast<std::size_t>(y)].size()) -
                         inter;
      list.emplace_back(y, inter / uni);
      overlap[static_cast<std::size_t>(y)] = 0;
    }
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (static_cast<int>(list.size()) > size) list.resize(static_cast<std::size_t>(size));
  }
  return neighborhoods;
}

inline std::vector<std::vector<std::pair<int, double>>> invert_neighborhoods(
    const std::vector<std::vector<std::pair<int, double>>>& neighborhoods) {
  std::vector<std::vector<std::pair<int, double>>> inverted(neighborhoods.size());
  for (std::size_t x = 0; x < neighborhoods.size(); ++x) {
    for (const auto& [y, sim] : neighborhoods[x]) {
      inverted[static_cast<std::size_t>(y)].emplace_back(static_cast<int>(x), sim);
    }
  }
  for (auto& list : inverted) std::sort(list.begin(), list.end());
  return inverted;
}

}  // namespace detail

/// Item-based neighborhood scoring: rel(u,i) is the similarity-weighted
/// average of u's ratings on the neighbors of i. Pairs with no rated
/// neighbor are absent.
inline RelevanceFunction score_item_based(const RatingDataset& train,
                                          const NeighborhoodModel& model) {
  if (train.triples.empty()) throw DataError("item-based scoring needs training data");
  auto neighborhoods =
      detail::jaccard_neighborhoods(train.by_item, train.by_user, model.size);
  if (model.inverted) neighborhoods = detail::invert_neighborhoods(neighborhoods);
  // influence[j]: items i whose neighborhood contains j, with sim(i,j).
  std::vector<std::vector<std::pair<int, double>>> influence(neighborhoods.size());
  for (std::size_t i = 0; i < neighborhoods.size(); ++i) {
    for (const auto& [j, sim] : neighborhoods[i]) {
      influence[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), sim);
    }
  }
  RelevanceFunction rel;
  rel.provenance = Provenance::item_based;
  rel.item_count = train.item_count();
  rel.scores.resize(train.by_user.size());
  std::vector<double> numerator(train.by_item.size(), 0.0);
  std::vector<double> denominator(train.by_item.size(), 0.0);
  std::vector<int> touched;
  for (std::size_t u = 0; u < train.by_user.size(); ++u) {
    touched.clear();
    for (const auto& [j, rating] : train.by_user[u]) {
      for (const auto& [i, sim] : influence[static_cast<std::size_t>(j)]) {
        if (denominator[static_cast<std::size_t>(i)] == 0.0) touched.push_back(i);
        numerator[static_cast<std::size_t>(i)] += sim * rating;
        denominator[static_cast<std::size_t>(i)] += sim;
      }
    }
    auto& row = rel.scores[u];
    for (int i : touched) {
      if (!train.rated(static_cast<int>(u), i)) {
        row.emplace_back(i, numerator[static_cast<std::size_t>(i)] /
                                denominator[static_cast<std::size_t>(i)]);
      }
      numerator[static_cast<std::size_t>(i)] = 0.0;
      denominator[static_cast<std::size_t>(i)] = 0.0;
    }
    std::sort(row.begin(), row.end());
  }
  detail::normalize_per_user(rel);
  return rel;
}

/// User-based counterpart: rel(u,i) averages the ratings that u's similar
/// users gave to i.
inline RelevanceFunction score_user_based(const RatingDataset& train,
                                          const NeighborhoodModel& model) {
  if (train.triples.empty()) throw DataError("user-based scoring needs training data");
  auto neighborhoods =
      detail::jaccard_neighborhoods(train.by_user, train.by_item, model.size);
  if (model.inverted) neighborhoods = detail::invert_neighborhoods(neighborhoods);
  RelevanceFunction rel;
  rel.provenance = Provenance::user_based;
  rel.item_count = train.item_count();
  rel.scores.resize(train.by_user.size());
  std::vector<double> numerator(train.by_item.size(), 0.0);
  std::vector<double> denominator(train.by_item.size(), 0.0);
  std::vector<int> touched;
  for (std::size_t u = 0; u < train.by_user.size(); ++u) {
    touched.clear();
    for (const auto& [peer, sim] : neighborhoods[u]) {
      for (const auto& [i, rating] : train.by_user[static_cast<std::size_t>(peer)]) {
        if (denominator[static_cast<std::size_t>(i)] == 0.0) touched.push_back(i);
        numerator[static_cast<std::size_t>(i)] += sim * rating;
        denominator[static_cast<std::size_t>(i)] += sim;
      }
    }
    auto& row = rel.scores[u];
    for (int i : touched) {
      if (!train.rated(static_cast<int>(u), i)) {
        row.emplace_back(i, numerator[static_cast<std::size_t>(i)] /
                                denominator[static_cast<std::size_t>(i)]);
      }
      numerator[static_cast<std::size_t>(i)] = 0.0;
      denominator[static_cast<std::size_t>(i)] = 0.0;
    }
    std::sort(row.begin(), row.end());
  }
  detail::normalize_per_user(rel);
  return rel;
}

/// Random-walk scoring over the unweighted interaction graph: the score
/// of (u,i) is the probability that a 3-step walk from u ends at i. Each
/// one-step transition row is raised elementwise to `alpha` and
/// renormalized to stochastic before walking.
inline RelevanceFunction score_random_walk(const RatingDataset& train, double alpha) {
  if (!(alpha > 0.0)) throw DataError("random-walk alpha must be positive");
  std::string isolated;
  for (std::size_t u = 0; u < train.by_user.size(); ++u) {
    if (train.by_user[u].empty()) {
      if (!isolated.empty()) isolated += ' ';
      isolated += std::to_string(u);
    }
  }
  if (!isolated.empty()) {
    throw DataError("random walk undefined for isolated users: " + isolated);
  }
  // Unweighted rows are uniform, so the powered row renormalizes to
  // 1/degree; computed via pow to keep the definition explicit.
  const auto step_weight = [alpha](std::size_t degree) {
    const double raw = 1.0 / static_cast<double>(degree);
    const double powered = std::pow(raw, alpha);
    return powered / (static_cast<double>(degree) * powered);
  };
  RelevanceFunction rel;
  rel.provenance = Provenance::random_walk;
  rel.item_count = train.item_count();
  rel.scores.resize(train.by_user.size());
  std::vector<double> user_mass(train.by_user.size(), 0.0);
  std::vector<double> item_mass(train.by_item.size(), 0.0);
  std::vector<int> touched_users, touched_items;
  for (std::size_t u = 0; u < train.by_user.size(); ++u) {
    touched_users.clear();
    touched_items.clear();
    const double w_u = step_weight(train.by_user[u].size());
    for (const auto& [i, unused] : train.by_user[u]) {
      const double w_i = step_weight(train.by_item[static_cast<std::size_t>(i)].size());
      for (const auto& [peer, unused2] : train.by_item[static_cast<std::size_t>(i)]) {
        if (user_mass[static_cast<std::size_t>(peer)] == 0.0) touched_users.push_back(peer);
        user_mass[static_cast<std::size_t>(peer)] += w_u * w_i;
      }
    }
    for (int peer : touched_users) {
      const double w_p = step_weight(train.by_user[static_cast<std::size_t>(peer)].size());
      const double mass = user_mass[static_cast<std::size_t>(peer)];
      for (const auto& [i, unused] : train.by_user[static_cast<std::size_t>(peer)]) {
        if (item_mass[static_cast<std::size_t>(i)] == 0.0) touched_items.push_back(i);
        item_mass[static_cast<std::size_t>(i)] += mass * w_p;
      }
      user_mass[static_cast<std::size_t>(peer)] = 0.0;
    }
    auto& row = rel.scores[u];
    for (int i : touched_items) {
      if (!train.rated(static_cast<int>(u), i)) {
        row.emplace_back(i, item_mass[static_cast<std::size_t>(i)]);
      }
      item_mass[static_cast<std::size_t>(i)] = 0.0;
    }
    std::sort(row.begin(), row.end());
  }
  detail::normalize_per_user(rel);
  return rel;
}

/// Per-user top-k thresholding into a candidate supergraph with the given
/// display constraint; ties broken by ascending item id. Edge weights are
/// the normalized scores.
inline CandidateGraph top_k_candidates(const RelevanceFunction& rel, int k, int display) {
  if (k < 1) throw DataError("top-k threshold must be >= 1");
  CandidateGraph g;
  g.user_count = static_cast<int>(rel.scores.size());
  g.item_count = rel.item_count;
  g.display.assign(rel.scores.size(), display);
  std::vector<std::pair<int, double>> order;
  for (std::size_t u = 0; u < rel.scores.size(); ++u) {
    order.assign(rel.scores[u].begin(), rel.scores[u].end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (static_cast<int>(order.size()) > k) order.resize(static_cast<std::size_t>(k));
    for (const auto& [item, score] : order) {
      CandidateEdge e;
      e.user = static_cast<int>(u);
      e.item = item;
      e.weight_fp = to_fixed(score);
      e.weight = from_fixed(e.weight_fp);
      g.edges.push_back(e);
    }
  }
  g.finalize();
  return g;
}

/// Loads "user\titem\tscore" rows (dense ids) and applies the per-user
/// normalization. When `train` is given, its rated pairs are dropped so
/// imported scorers obey the same no-rerecommend rule as the others.
inline RelevanceFunction import_scores(std::istream& in,
                                       const RatingDataset* train = nullptr) {
  RelevanceFunction rel;
  rel.provenance = Provenance::imported;
  std::string line;
  std::size_t line_number = 0;
  int max_item = -1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int user = 0, item = 0;
    double score = 0.0;
    if (!(row >> user >> item >> score) || user < 0 || item < 0) {
      throw DataError("malformed score row at line " + std::to_string(line_number));
    }
    if (train != nullptr && user < train->user_count() && item < train->item_count() &&
        train->rated(user, item)) {
      continue;
    }
    if (static_cast<std::size_t>(user) >= rel.scores.size()) {
      rel.scores.resize(static_cast<std::size_t>(user) + 1);
    }
    rel.scores[static_cast<std::size_t>(user)].emplace_back(item, score);
    max_item = std::max(max_item, item);
  }
  if (rel.scores.empty()) throw DataError("empty score input");
  rel.item_count = train != nullptr ? train->item_count() : max_item + 1;
  for (auto& row : rel.scores) {
    std::sort(row.begin(), row.end());
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].first == row[i - 1].first) {
        throw DataError("duplicate imported score for pair");
      }
    }
  }
  detail::normalize_per_user(rel);
  return rel;
}

inline void export_scores(const RelevanceFunction& rel, std::ostream& out) {
  for (std::size_t u = 0; u < rel.scores.size(); ++u) {
    for (const auto& [item, score] : rel.scores[u]) {
      out << u << '\t' << item << '\t' << format_double(score) << '\n';
    }
  }
}

}  // namespace recflow

#endif  // RECFLOW_RELEVANCE_HPP
