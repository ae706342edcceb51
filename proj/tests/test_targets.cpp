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

#include "recflow/targets.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"

namespace recflow {
namespace {

CandidateGraph graph_with(int users, int items, const std::vector<std::pair<int, int>>& uv,
                          const std::vector<int>& display) {
  CandidateGraph g;
  g.user_count = users;
  g.item_count = items;
  for (const auto& [u, v] : uv) {
    CandidateEdge e;
    e.user = u;
    e.item = v;
    e.weight = 0.5;
    e.weight_fp = to_fixed(0.5);
    g.edges.push_back(e);
  }
  g.display = display;
  g.finalize();
  return g;
}

TEST(LargestRemainder, ExactWhenDivisible) {
  EXPECT_EQ(largest_remainder_round({2.0, 2.0, 2.0}, 6),
            (std::vector<long long>{2, 2, 2}));
}

TEST(LargestRemainder, TieBrokenByAscendingIndex) {
  // 5/3 each: floors (1,1,1), remainders equal, two leftover units go to
  // items 0 and 1.
  EXPECT_EQ(largest_remainder_round({5.0 / 3, 5.0 / 3, 5.0 / 3}, 5),
            (std::vector<long long>{2, 2, 1}));
}

TEST(UniformTarget, DivisibleCase) {
  const CandidateGraph g = graph_with(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0}, {2, 2}},
                                      {2, 2, 2});
  const TargetDistribution t = uniform_target(g);
  EXPECT_EQ(t.counts, (std::vector<long long>{2, 2, 2}));
  EXPECT_EQ(t.total(), g.total_display());
}

TEST(UniformTarget, RemainderCase) {
  const CandidateGraph g =
      graph_with(5, 3, {{0, 0}, {1, 0}, {2, 1}, {3, 2}, {4, 1}}, {1, 1, 1, 1, 1});
  const TargetDistribution t = uniform_target(g);
  EXPECT_EQ(t.counts, (std::vector<long long>{2, 2, 1}));
}

TEST(UniformTarget, ZeroTotal) {
  const CandidateGraph g = graph_with(1, 3, {{0, 0}}, {0});
  const TargetDistribution t = uniform_target(g);
  EXPECT_EQ(t.counts, (std::vector<long long>{0, 0, 0}));
}

TEST(ProportionalTarget, SymmetricCase) {
  const CandidateGraph g = graph_with(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}},
                                      {1, 1, 1});
  const TargetDistribution t = proportional_target(g);
  EXPECT_EQ(t.counts, (std::vector<long long>{1, 1, 1}));
}

TEST(ProportionalTarget, ZeroPreservingScale) {
  // Supergraph indegrees (4, 0) with display total 2 scale to (2, 0).
  CandidateGraph star;
  star.user_count = 4;
  star.item_count = 2;
  for (int u = 0; u < 4; ++u) {
    CandidateEdge e;
    e.user = u;
    e.item = 0;
    e.weight = 0.5;
    e.weight_fp = to_fixed(0.5);
    star.edges.push_back(e);
  }
  star.display = {1, 1, 0, 0};
  star.finalize();
  const TargetDistribution t = proportional_target(star);
  EXPECT_EQ(t.counts, (std::vector<long long>{2, 0}));
}

TEST(ProportionalTarget, LargestRemainderHalfTie) {
  // indegrees (3,1), total display 2: real (1.5, 0.5), floors (1, 0),
  // equal remainders, leftover unit goes to item 0.
  CandidateGraph g;
  g.user_count = 4;
  g.item_count = 2;
  for (int u = 0; u < 4; ++u) {
    CandidateEdge e;
    e.user = u;
    e.item = u < 3 ? 0 : 1;
    e.weight = 0.5;
    e.weight_fp = to_fixed(0.5);
    g.edges.push_back(e);
  }
  g.display = {1, 1, 0, 0};
  g.finalize();
  const TargetDistribution t = proportional_target(g);
  EXPECT_EQ(t.counts, (std::vector<long long>{2, 0}));
}

TEST(BlendTarget, EndpointsReproduceOperands) {
  TargetDistribution f;
  f.real = {2.0, 2.0, 2.0};
  f.counts = largest_remainder_round(f.real, 6);
  TargetDistribution p;
  p.real = {4.0, 1.0, 1.0};
  p.counts = largest_remainder_round(p.real, 6);
  EXPECT_EQ(blend_target(f, p, 1.0, 6).counts, f.counts);
  EXPECT_EQ(blend_target(f, p, 0.0, 6).counts, p.counts);
}

TEST(BlendTarget, MidpointLargestRemainder) {
  TargetDistribution f;
  f.real = {2.0, 2.0, 2.0};
  TargetDistribution p;
  p.real = {4.0, 1.0, 1.0};
  const TargetDistribution t = blend_target(f, p, 0.5, 6);
  // real (3, 1.5, 1.5): floors (3,1,1), one unit left, tie -> item 1.
  EXPECT_EQ(t.counts, (std::vector<long long>{3, 2, 1}));
}

TEST(BlendTarget, AlphaOutsideRangeThrows) {
  TargetDistribution f;
  f.real = {1.0};
  TargetDistribution p;
  p.real = {1.0};
  EXPECT_THROW(blend_target(f, p, -0.1, 1), DataError);
  EXPECT_THROW(blend_target(f, p, 1.1, 1), DataError);
}

TEST(BlendTarget, TotalPreservedAcrossAlphaSweep) {
  std::mt19937_64 rng(17);
  const testing::RandomInstance inst = testing::random_instance(rng);
  TargetDistribution f;
  f.real.assign(static_cast<std::size_t>(inst.graph.item_count),
                static_cast<double>(inst.graph.total_display()) / inst.graph.item_count);
  TargetDistribution p;
  p.real.assign(inst.target.real.begin(), inst.target.real.end());
  for (double alpha : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const TargetDistribution t =
        blend_target(f, p, alpha, inst.graph.total_display());
    EXPECT_EQ(t.total(), inst.graph.total_display()) << "alpha " << alpha;
    for (std::size_t j = 0; j < t.counts.size(); ++j) {
      EXPECT_LT(std::abs(static_cast<double>(t.counts[j]) - t.real[j]), 1.0);
    }
  }
}

TEST(TargetDiscrepancy, HalfL1Normalized) {
  TargetDistribution a;
  a.counts = {2, 2, 2};
  TargetDistribution b;
  b.counts = {4, 1, 1};
  // L1 = 2+1+1 = 4; total 6; 4 / 12.
  EXPECT_DOUBLE_EQ(target_discrepancy(a, b), 4.0 / 12.0);
}

TEST(TargetTsv, RoundTrip) {
  TargetDistribution t;
  t.counts = {3, 0, 2};
  t.real = {3.0, 0.0, 2.0};
  std::ostringstream out;
  write_target_tsv(t, out);
  std::istringstream in(out.str());
  const TargetDistribution back = read_target_tsv(in);
  EXPECT_EQ(back.counts, t.counts);
}

TEST(CategorySpec, ValidatesInvariants) {
  TargetDistribution t;
  t.counts = {2, 2, 2};
  CategorySpec cats;
  cats.category_of = {0, 0, 1};
  cats.minimums = {3, 1};
  EXPECT_NO_THROW(cats.validate(t, 6));
  cats.minimums = {5, 0};  // exceeds category 0 aggregate target (4)
  EXPECT_THROW(cats.validate(t, 6), DataError);
  cats.minimums = {4, 3};  // exceeds display total
  EXPECT_THROW(cats.validate(t, 6), DataError);
  cats.category_of = {0, 0, 7};  // non-partition
  cats.minimums = {1, 1};
  EXPECT_THROW(cats.validate(t, 6), DataError);
}

}  // namespace
}  // namespace recflow
