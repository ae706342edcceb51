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

#include "recflow/rerankers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace recflow {
namespace {

CandidateEdge edge(int u, int v, double w) {
  CandidateEdge e;
  e.user = u;
  e.item = v;
  e.weight_fp = to_fixed(w);
  e.weight = from_fixed(e.weight_fp);
  return e;
}

CandidateGraph graph(int users, int items, std::vector<CandidateEdge> edges,
                     std::vector<int> display) {
  CandidateGraph g;
  g.user_count = users;
  g.item_count = items;
  g.edges = std::move(edges);
  g.display = std::move(display);
  g.finalize();
  return g;
}

RatingDataset dataset_from(const std::vector<RatingTriple>& triples) {
  RatingDataset ds;
  ds.triples = triples;
  ds.reindex();
  return ds;
}

int item_at_slot(const CandidateGraph& g, const SolutionSubgraph& h, int user, int slot) {
  return g.edges[static_cast<std::size_t>(
                     h.ranked[static_cast<std::size_t>(user)][static_cast<std::size_t>(slot)])]
      .item;
}

TEST(SeenModel, FractionOfUsersWhoRated) {
  const RatingDataset ds = dataset_from(
      {{0, 0, 4, -1}, {1, 0, 3, -1}, {1, 1, 5, -1}, {2, 2, 2, -1}, {2, 0, 1, -1}});
  const SeenModel seen = make_seen_model(ds);
  EXPECT_DOUBLE_EQ(seen.p_seen[0], 1.0);
  EXPECT_DOUBLE_EQ(seen.p_seen[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(seen.p_seen[2], 1.0 / 3.0);
}

TEST(RerankTop, ArgmaxForSingleSlot) {
  const CandidateGraph g =
      graph(1, 3, {edge(0, 0, .2), edge(0, 1, .9), edge(0, 2, .5)}, {1});
  const SolutionSubgraph h = rerank_top(g);
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
}

TEST(RerankTop, TiesPreferLowerItemId) {
  const CandidateGraph g =
      graph(1, 3, {edge(0, 0, .5), edge(0, 1, .9), edge(0, 2, .9)}, {2});
  const SolutionSubgraph h = rerank_top(g);
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
  EXPECT_EQ(item_at_slot(g, h, 0, 1), 2);
}

TEST(RerankTop, MatchesFullSortOracle) {
  const CandidateGraph g = graph(
      1, 5,
      {edge(0, 0, .3), edge(0, 1, .8), edge(0, 2, .1), edge(0, 3, .8), edge(0, 4, .5)},
      {3});
  const SolutionSubgraph h = rerank_top(g);
  // sort by (score desc, item asc): 1(.8), 3(.8), 4(.5).
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
  EXPECT_EQ(item_at_slot(g, h, 0, 1), 3);
  EXPECT_EQ(item_at_slot(g, h, 0, 2), 4);
}

TEST(RerankPc, NoveltyZeroWhenEveryoneRated) {
  // Item 0 rated by all users: nov = 0, score = rel / 2; item 1 rated by
  // nobody: nov = 1. A weak unseen item overtakes a strong seen one.
  const RatingDataset train =
      dataset_from({{0, 0, 4, -1}, {1, 0, 5, -1}, {2, 0, 3, -1}});
  const SeenModel seen = make_seen_model(train);
  const CandidateGraph g = graph(1, 2, {edge(0, 0, .9), edge(0, 1, .2)}, {1});
  const SolutionSubgraph h = rerank_pc(g, seen);
  // scores: item0 (.9+0)/2 = .45; item1 (.2+1)/2 = .6.
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
}

TEST(RerankPc, MatchesHandComputedAverages) {
  const RatingDataset train =
      dataset_from({{0, 0, 4, -1}, {1, 0, 5, -1}, {1, 1, 3, -1}, {2, 2, 4, -1}});
  const SeenModel seen = make_seen_model(train);
  // p_seen: item0 2/3, item1 1/3, item2 1/3.
  const CandidateGraph g =
      graph(1, 3, {edge(0, 0, .6), edge(0, 1, .2), edge(0, 2, .5)}, {3});
  const SolutionSubgraph h = rerank_pc(g, seen);
  // scores: (.6 + 1/3)/2 = .4667, (.2 + 2/3)/2 = .4333, (.5 + 2/3)/2 = .5833.
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 2);
  EXPECT_EQ(item_at_slot(g, h, 0, 1), 0);
  EXPECT_EQ(item_at_slot(g, h, 0, 2), 1);
}

TEST(RerankFd, LogNoveltyValues) {
  // p(seen) = 0.5 gives raw novelty 1; p(seen) = 1 gives 0.
  const RatingDataset train = dataset_from({{0, 0, 4, -1}, {1, 0, 5, -1}, {1, 1, 3, -1}});
  const SeenModel seen = make_seen_model(train);
  EXPECT_DOUBLE_EQ(-std::log2(seen.p_seen[0]), 0.0);
  EXPECT_DOUBLE_EQ(-std::log2(seen.p_seen[1]), 1.0);
  const CandidateGraph g = graph(1, 2, {edge(0, 0, .6), edge(0, 1, .3)}, {1});
  const SolutionSubgraph h = rerank_fd(g, seen, train.user_ids.size());
  // Normalized novelty: item0 -> 0, item1 -> 1; scores .3 vs .65.
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
}

TEST(RerankFd, UnseenItemGetsFlooredProbability) {
  const RatingDataset train = dataset_from({{0, 0, 4, -1}, {1, 0, 5, -1}});
  SeenModel seen = make_seen_model(train);
  seen.p_seen.push_back(0.0);  // an item never rated in training
  const CandidateGraph g = graph(1, 2, {edge(0, 0, .9), edge(0, 1, .0)}, {2});
  const SolutionSubgraph h = rerank_fd(g, seen, train.user_ids.size());
  ASSERT_EQ(h.chosen.size(), 2u);  // no NaN/inf blowup; both ranked
  // floor p = 1/(2*2): novelty(item1) = log2(4) = 2 -> normalized 1.
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);  // (.0+1)/2 = .5 vs (.9+0)/2 = .45
}

TEST(RerankFd, FormulaOracleWithNormalization) {
  const RatingDataset train = dataset_from(
      {{0, 0, 4, -1}, {1, 0, 5, -1}, {2, 0, 3, -1}, {2, 1, 3, -1}, {1, 2, 2, -1},
       {0, 2, 2, -1}});
  const SeenModel seen = make_seen_model(train);
  // p_seen = (1, 1/3, 2/3); raw nov = (0, log2(3), log2(1.5)).
  const double n1 = std::log2(3.0);
  const double n2 = std::log2(1.5);
  const double hi = n1, lo = 0.0;
  const double norm1 = (n1 - lo) / (hi - lo);
  const double norm2 = (n2 - lo) / (hi - lo);
  const CandidateGraph g =
      graph(1, 3, {edge(0, 1, .4), edge(0, 2, .8)}, {2});
  const SolutionSubgraph h = rerank_fd(g, seen, train.user_ids.size());
  const double score1 = (.4 + norm1) / 2.0;
  const double score2 = (.8 + norm2) / 2.0;
  EXPECT_EQ(item_at_slot(g, h, 0, 0), score1 > score2 ? 1 : 2);
}

TEST(RerankBayes, AlphaZeroMatchesTop) {
  const CandidateGraph g = graph(
      2, 3,
      {edge(0, 0, .9), edge(0, 1, .5), edge(0, 2, .7), edge(1, 0, .8), edge(1, 1, .1),
       edge(1, 2, .3)},
      {2, 2});
  const SolutionSubgraph bayes = rerank_bayes(g, 0.0);
  const SolutionSubgraph top = rerank_top(g);
  EXPECT_EQ(bayes.chosen, top.chosen);
  EXPECT_EQ(bayes.ranked, top.ranked);
}

TEST(RerankBayes, DampsPopularItems) {
  // Equal per-user relevance, score sums 10x apart: the low-sum item
  // must rank first for alpha = 1.
  std::vector<CandidateEdge> edges;
  edges.push_back(edge(0, 0, .5));
  edges.push_back(edge(0, 1, .5));
  for (int u = 1; u < 10; ++u) edges.push_back(edge(u, 0, .5));
  std::vector<int> display(10, 1);
  edges.push_back(edge(9, 1, .06));  // keep item 1's sum small but nonzero
  const CandidateGraph g = graph(10, 2, std::move(edges), display);
  const SolutionSubgraph h = rerank_bayes(g, 1.0);
  EXPECT_EQ(item_at_slot(g, h, 0, 0), 1);
}

TEST(RerankBayes, FormulaOracleAtHalfAlpha) {
  const CandidateGraph g = graph(
      3, 2,
      {edge(0, 0, .9), edge(0, 1, .5), edge(1, 0, .8), edge(2, 0, .7), edge(2, 1, .1)},
      {1, 1, 1});
  const SolutionSubgraph h = rerank_bayes(g, 0.5);
  const double sum0 = .9 + .8 + .7;
  const double sum1 = .5 + .1;
  const double u0_item0 = .9 * std::pow(sum0, -0.5);
  const double u0_item1 = .5 * std::pow(sum1, -0.5);
  EXPECT_EQ(item_at_slot(g, h, 0, 0), u0_item0 > u0_item1 ? 0 : 1);
}

TEST(Rerankers, DegenerateNoveltyReproducesTopRanking) {
  // All items equally popular: PC and FD shift every score by the same
  // constant, so the ranking equals TOP's.
  const RatingDataset train = dataset_from(
      {{0, 0, 4, -1}, {0, 1, 4, -1}, {0, 2, 4, -1}, {1, 0, 4, -1}, {1, 1, 4, -1},
       {1, 2, 4, -1}});
  const SeenModel seen = make_seen_model(train);
  const CandidateGraph g = graph(
      2, 3,
      {edge(0, 0, .9), edge(0, 1, .5), edge(0, 2, .7), edge(1, 0, .2), edge(1, 1, .8),
       edge(1, 2, .4)},
      {2, 2});
  const SolutionSubgraph top = rerank_top(g);
  EXPECT_EQ(rerank_pc(g, seen).ranked, top.ranked);
  EXPECT_EQ(rerank_fd(g, seen, train.user_ids.size()).ranked, top.ranked);
}

TEST(Rerankers, InfeasibleDisplayThrows) {
  const CandidateGraph g = graph(1, 2, {edge(0, 0, .5)}, {2});
  EXPECT_THROW(rerank_top(g), InfeasibleError);
}

}  // namespace
}  // namespace recflow
