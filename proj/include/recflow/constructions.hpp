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

#ifndef RECFLOW_CONSTRUCTIONS_HPP
#define RECFLOW_CONSTRUCTIONS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "recflow/common.hpp"
#include "recflow/graph.hpp"
#include "recflow/min_cost_flow.hpp"
#include "recflow/targets.hpp"

namespace recflow {

/// Output of every diversifying construction. `discrepancy` is always the
/// plain L1 distance between realized and target indegrees, recomputed
/// from the extracted subgraph; `flow_cost` is in the mode's own cost
/// units and is asserted against the mode's accounting identity.
struct DiscrepancyResult {
  SolutionSubgraph subgraph;
  long long discrepancy = 0;
  Fixed total_relevance_fp = 0;
  long long flow_cost = 0;
  Fixed gain_fp = 0;            // discounted-gain modes only
  long long items_covered = 0;  // items with indegree >= 1
  std::vector<std::string> warnings;
};

// Discount weight of recommendation slot i (1-based): 1/ln(i+1), in
// micro-units. Natural log, matching the DCG metric.
inline Fixed slot_discount_fp(int slot) {
  return static_cast<Fixed>(std::llround(static_cast<double>(kWeightScale) /
                                         std::log(static_cast<double>(slot) + 1.0)));
}

// Relevance discounted by slot, in micro-units.
inline Fixed discounted_gain_fp(Fixed weight_fp, int slot) {
  return static_cast<Fixed>(std::llround(static_cast<double>(weight_fp) /
                                         std::log(static_cast<double>(slot) + 1.0)));
}

namespace detail {

// The Theorem-1 network: user supplies c_i, unit-capacity candidate arcs,
// per-item free arcs capped at a_j into t1, charged overflow arcs into t2,
// and the free (t1, t2) spill arc. Node layout: users, items, t1, t2.
struct DiscrepancyNetwork {
  FlowNetwork net;
  std::vector<int> edge_arc;      // arc id per candidate edge
  int t1 = -1;
  int t2 = -1;
  int t1_t2_arc = -1;
};

inline DiscrepancyNetwork build_base_network(
    const CandidateGraph& g, const TargetDistribution& t, long long overflow_cost,
    const std::function<long long(std::size_t)>& edge_cost,
    bool require_matching_totals) {
  require_feasible(g);
  if (t.counts.size() != static_cast<std::size_t>(g.item_count)) {
    throw DataError("target length != item count");
  }
  const long long total_display = g.total_display();
  if (require_matching_totals && t.total() != total_display) {
    throw DataError("target total " + std::to_string(t.total()) +
                    " != display total " + std::to_string(total_display));
  }
  DiscrepancyNetwork out;
  FlowNetwork& net = out.net;
  for (int u = 0; u < g.user_count; ++u) {
    net.add_node(g.display[static_cast<std::size_t>(u)]);
  }
  for (int j = 0; j < g.item_count; ++j) net.add_node(0);
  out.t1 = net.add_node(0);
  out.t2 = net.add_node(-total_display);
  const long long infinite = net.infinite_capacity();

  out.edge_arc.reserve(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    out.edge_arc.push_back(net.add_arc(g.edges[e].user, g.user_count + g.edges[e].item,
                                       0, 1, edge_cost ? edge_cost(e) : 0));
  }
  for (int j = 0; j < g.item_count; ++j) {
    net.add_arc(g.user_count + j, out.t1, 0, t.counts[static_cast<std::size_t>(j)], 0);
    net.add_arc(g.user_count + j, out.t2, 0, infinite, overflow_cost);
  }
  out.t1_t2_arc = net.add_arc(out.t1, out.t2, 0, infinite, 0);
  return out;
}

inline SolutionSubgraph extract_subgraph(const CandidateGraph& g,
                                         const std::vector<int>& edge_arc,
                                         const FlowSolution& sol) {
  SolutionSubgraph h;
  h.parent = &g;
  for (std::size_t e = 0; e < edge_arc.size(); ++e) {
    if (sol.flow[static_cast<std::size_t>(edge_arc[e])] > 0) {
      h.chosen.push_back(static_cast<int>(e));
    }
  }
  h.rank_by_weight();
  check_solution_degrees(h);
  return h;
}

inline FlowSolution solve_or_throw(const FlowNetwork& net, const SolveOptions& options) {
  FlowSolution sol = solve_min_cost_flow(net, options);
  if (sol.status != SolveStatus::optimal) {
    throw InfeasibleError("flow network has no feasible solution");
  }
  return sol;
}

inline long long coverage_of(const std::vector<long long>& indegrees) {
  long long covered = 0;
  for (long long d : indegrees) covered += d >= 1 ? 1 : 0;
  return covered;
}

inline TargetDistribution all_ones_target(const CandidateGraph& g) {
  TargetDistribution ones;
  ones.counts.assign(static_cast<std::size_t>(g.item_count), 1);
  ones.real.assign(static_cast<std::size_t>(g.item_count), 1.0);
  return ones;
}

// Fills the result fields shared by every mode.
inline void fill_common(DiscrepancyResult& result, const TargetDistribution& t,
                        const FlowSolution& sol) {
  const std::vector<long long> deg = indegree_vector(result.subgraph);
  result.discrepancy = discrepancy_of(deg, t);
  result.total_relevance_fp = result.subgraph.total_relevance_fp();
  result.flow_cost = sol.cost;
  result.items_covered = coverage_of(deg);
}

// Shared first pass of the relevance-aware modes: the optimal discrepancy
// and the (t1, t2) flow value that pins it, total_display - overflow.
struct PinnedDiscrepancy {
  long long optimum = 0;
  long long t1_t2_flow = 0;
};

inline PinnedDiscrepancy solve_first_pass(const CandidateGraph& g,
                                          const TargetDistribution& t,
                                          const SolveOptions& options) {
  DiscrepancyNetwork dn = build_base_network(g, t, 2, nullptr, true);
  const FlowSolution sol = solve_or_throw(dn.net, options);
  PinnedDiscrepancy pass;
  pass.optimum = sol.cost;
  if (pass.optimum % 2 != 0) throw InternalError("odd discrepancy flow cost");
  pass.t1_t2_flow = g.total_display() - pass.optimum / 2;
  return pass;
}

// Pass-2 network of the two-pass method: structural costs dropped,
// candidate arcs carry negated relevance, spill arc pinned.
inline DiscrepancyNetwork build_relevance_pass(const CandidateGraph& g,
                                               const TargetDistribution& t,
                                               const PinnedDiscrepancy& pass) {
  DiscrepancyNetwork dn = build_base_network(
      g, t, 0, [&g](std::size_t e) { return -g.edges[e].weight_fp; }, true);
  dn.net.arcs[static_cast<std::size_t>(dn.t1_t2_arc)].lower = pass.t1_t2_flow;
  dn.net.arcs[static_cast<std::size_t>(dn.t1_t2_arc)].capacity = pass.t1_t2_flow;
  return dn;
}

inline DiscrepancyNetwork build_weighted(const CandidateGraph& g,
                                         const TargetDistribution& t, double mu) {
  if (mu < 0.0) throw DataError("weighted method needs mu >= 0");
  return build_base_network(
      g, t, 2 * kWeightScale,
      [&g, mu](std::size_t e) {
        return -static_cast<long long>(
            std::llround(mu * static_cast<double>(g.edges[e].weight_fp)));
      },
      true);
}

// Binary-CDG network: per user a gateway node fed by parallel unit arcs
// of cost -1/ln(2), -1/ln(3), ...; relevant candidate edges leave from
// the gateway, the rest from the user directly. Spill arc pinned to the
// optimal discrepancy.
struct BinaryCdgNetwork {
  FlowNetwork net;
  std::vector<int> edge_arc;
};

inline BinaryCdgNetwork build_binary_cdg(const CandidateGraph& g,
                                         const TargetDistribution& t,
                                         const std::vector<char>& relevant,
                                         const PinnedDiscrepancy& pass) {
  if (relevant.size() != g.edges.size()) {
    throw DataError("relevance flags length != edge count");
  }
  require_feasible(g);
  BinaryCdgNetwork out;
  FlowNetwork& net = out.net;
  for (int u = 0; u < g.user_count; ++u) net.add_node(g.display[static_cast<std::size_t>(u)]);
  for (int j = 0; j < g.item_count; ++j) net.add_node(0);
  const int t1 = net.add_node(0);
  const int t2 = net.add_node(-g.total_display());
  std::vector<int> gateway(static_cast<std::size_t>(g.user_count));
  for (int u = 0; u < g.user_count; ++u) {
    gateway[static_cast<std::size_t>(u)] = net.add_node(0);
  }
  const long long infinite = net.infinite_capacity();
  for (int u = 0; u < g.user_count; ++u) {
    for (int slot = 1; slot <= g.display[static_cast<std::size_t>(u)]; ++slot) {
      net.add_arc(u, gateway[static_cast<std::size_t>(u)], 0, 1, -slot_discount_fp(slot));
    }
  }
  out.edge_arc.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int from = relevant[e] ? gateway[static_cast<std::size_t>(g.edges[e].user)]
                                 : g.edges[e].user;
    out.edge_arc[e] = net.add_arc(from, g.user_count + g.edges[e].item, 0, 1, 0);
  }
  for (int j = 0; j < g.item_count; ++j) {
    net.add_arc(g.user_count + j, t1, 0, t.counts[static_cast<std::size_t>(j)], 0);
    net.add_arc(g.user_count + j, t2, 0, infinite, 0);
  }
  net.add_arc(t1, t2, pass.t1_t2_flow, pass.t1_t2_flow, 0);
  return out;
}

// Full-CDG network: c slot nodes per user; each candidate edge gets one
// arc per slot, discounted by the slot, all funneled through a
// unit-capacity node so no (user, item) pair repeats across slots.
struct FullCdgNetwork {
  FlowNetwork net;
  std::vector<int> edge_arc;       // funnel -> item arc per edge
  std::vector<int> slot_edge_arc;  // [e * display + slot]
  int display = 0;
};

inline FullCdgNetwork build_full_cdg(const CandidateGraph& g, const TargetDistribution& t,
                                     const PinnedDiscrepancy& pass) {
  for (int u = 1; u < g.user_count; ++u) {
    if (g.display[static_cast<std::size_t>(u)] != g.display[0]) {
      throw DataError("full-CDG construction needs a uniform display constant");
    }
  }
  require_feasible(g);
  FullCdgNetwork out;
  out.display = g.user_count > 0 ? g.display[0] : 0;
  const int display = out.display;
  FlowNetwork& net = out.net;
  for (int u = 0; u < g.user_count; ++u) net.add_node(display);
  for (int j = 0; j < g.item_count; ++j) net.add_node(0);
  const int t1 = net.add_node(0);
  const int t2 = net.add_node(-g.total_display());
  std::vector<int> slot_node(static_cast<std::size_t>(g.user_count) *
                             static_cast<std::size_t>(display));
  for (int u = 0; u < g.user_count; ++u) {
    for (int slot = 0; slot < display; ++slot) {
      slot_node[static_cast<std::size_t>(u) * static_cast<std::size_t>(display) +
                static_cast<std::size_t>(slot)] = net.add_node(0);
    }
  }
  std::vector<int> funnel(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) funnel[e] = net.add_node(0);
  const long long infinite = net.infinite_capacity();

  for (int u = 0; u < g.user_count; ++u) {
    for (int slot = 0; slot < display; ++slot) {
      net.add_arc(u,
                  slot_node[static_cast<std::size_t>(u) * static_cast<std::size_t>(display) +
                            static_cast<std::size_t>(slot)],
                  0, 1, 0);
    }
  }
  out.slot_edge_arc.resize(g.edges.size() * static_cast<std::size_t>(display));
  out.edge_arc.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    for (int slot = 0; slot < display; ++slot) {
      out.slot_edge_arc[e * static_cast<std::size_t>(display) + static_cast<std::size_t>(slot)] =
          net.add_arc(slot_node[static_cast<std::size_t>(g.edges[e].user) *
                                    static_cast<std::size_t>(display) +
                                static_cast<std::size_t>(slot)],
                      funnel[e], 0, 1, -discounted_gain_fp(g.edges[e].weight_fp, slot + 1));
    }
    out.edge_arc[e] = net.add_arc(funnel[e], g.user_count + g.edges[e].item, 0, 1, 0);
  }
  for (int j = 0; j < g.item_count; ++j) {
    net.add_arc(g.user_count + j, t1, 0, t.counts[static_cast<std::size_t>(j)], 0);
    net.add_arc(g.user_count + j, t2, 0, infinite, 0);
  }
  net.add_arc(t1, t2, pass.t1_t2_flow, pass.t1_t2_flow, 0);
  return out;
}

// Category network: per category a free target funnel (t1_i -> pool_i)
// plus the charged overflow arcs, a free pool -> category-sink arc capped
// at the floor A_i, and a distributor that tops up short categories at
// unit cost while genuine surplus drains to the supersink for free.
struct CategoryNetwork {
  FlowNetwork net;
  std::vector<int> edge_arc;
};

inline CategoryNetwork build_category(const CandidateGraph& g, const TargetDistribution& t,
                                      const CategorySpec& cats) {
  require_feasible(g);
  if (t.counts.size() != static_cast<std::size_t>(g.item_count)) {
    throw DataError("target length != item count");
  }
  const long long total_display = g.total_display();
  if (t.total() != total_display) throw DataError("target total != display total");
  cats.validate(t, total_display);
  const int k = cats.category_count();
  long long minimum_total = 0;
  for (long long a : cats.minimums) minimum_total += a;

  CategoryNetwork out;
  FlowNetwork& net = out.net;
  for (int u = 0; u < g.user_count; ++u) net.add_node(g.display[static_cast<std::size_t>(u)]);
  for (int j = 0; j < g.item_count; ++j) net.add_node(0);
  std::vector<int> cat_t1(static_cast<std::size_t>(k));
  std::vector<int> cat_pool(static_cast<std::size_t>(k));
  std::vector<int> cat_sink(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    cat_t1[static_cast<std::size_t>(c)] = net.add_node(0);
    cat_pool[static_cast<std::size_t>(c)] = net.add_node(0);
    cat_sink[static_cast<std::size_t>(c)] =
        net.add_node(-cats.minimums[static_cast<std::size_t>(c)]);
  }
  const int distributor = net.add_node(0);
  const int supersink = net.add_node(-(total_display - minimum_total));
  const long long infinite = net.infinite_capacity();

  out.edge_arc.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    out.edge_arc[e] = net.add_arc(g.edges[e].user, g.user_count + g.edges[e].item, 0, 1, 0);
  }
  for (int j = 0; j < g.item_count; ++j) {
    const int c = cats.category_of[static_cast<std::size_t>(j)];
    net.add_arc(g.user_count + j, cat_t1[static_cast<std::size_t>(c)], 0,
                t.counts[static_cast<std::size_t>(j)], 0);
    net.add_arc(g.user_count + j, cat_pool[static_cast<std::size_t>(c)], 0, infinite, 2);
  }
  for (int c = 0; c < k; ++c) {
    net.add_arc(cat_t1[static_cast<std::size_t>(c)], cat_pool[static_cast<std::size_t>(c)],
                0, infinite, 0);
    net.add_arc(cat_pool[static_cast<std::size_t>(c)], cat_sink[static_cast<std::size_t>(c)],
                0, cats.minimums[static_cast<std::size_t>(c)], 0);
    net.add_arc(cat_pool[static_cast<std::size_t>(c)], distributor, 0, infinite, 0);
    net.add_arc(distributor, cat_sink[static_cast<std::size_t>(c)], 0, infinite, 1);
    net.add_arc(cat_sink[static_cast<std::size_t>(c)], supersink, 0, infinite, 0);
  }
  net.add_arc(distributor, supersink, 0, infinite, 0);
  return out;
}

struct TwoSlopeParams {
  int threshold = 20;
  int s1 = 1;
  int s2 = 2;
};

inline DiscrepancyNetwork build_two_slope(const CandidateGraph& g,
                                          const TargetDistribution& t,
                                          const TwoSlopeParams& params) {
  if (params.threshold < 1) throw DataError("two-slope threshold must be >= 1");
  if (!(params.s2 >= params.s1 && params.s1 >= 1)) {
    throw DataError("two-slope needs s2 >= s1 >= 1");
  }
  require_feasible(g);
  if (t.total() != g.total_display()) throw DataError("target total != display total");
  DiscrepancyNetwork out;
  FlowNetwork& net = out.net;
  for (int u = 0; u < g.user_count; ++u) net.add_node(g.display[static_cast<std::size_t>(u)]);
  for (int j = 0; j < g.item_count; ++j) net.add_node(0);
  out.t1 = net.add_node(0);
  out.t2 = net.add_node(-g.total_display());
  const long long infinite = net.infinite_capacity();
  out.edge_arc.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    out.edge_arc[e] = net.add_arc(g.edges[e].user, g.user_count + g.edges[e].item, 0, 1, 0);
  }
  for (int j = 0; j < g.item_count; ++j) {
    net.add_arc(g.user_count + j, out.t1, 0, t.counts[static_cast<std::size_t>(j)], 0);
    net.add_arc(g.user_count + j, out.t2, 0, params.threshold, 2LL * params.s1);
    net.add_arc(g.user_count + j, out.t2, 0, infinite, 2LL * params.s2);
  }
  out.t1_t2_arc = net.add_arc(out.t1, out.t2, 0, infinite, 0);
  return out;
}

}  // namespace detail

// --- network builders (DIMACS export surface) ------------------------------

inline FlowNetwork build_discrepancy_network(const CandidateGraph& g,
                                             const TargetDistribution& t) {
  return detail::build_base_network(g, t, 2, nullptr, true).net;
}

inline FlowNetwork build_aggdiv_network(const CandidateGraph& g) {
  return detail::build_base_network(g, detail::all_ones_target(g), 2, nullptr, false).net;
}

inline FlowNetwork build_two_pass_network(const CandidateGraph& g,
                                          const TargetDistribution& t,
                                          const SolveOptions& options = {}) {
  return detail::build_relevance_pass(g, t, detail::solve_first_pass(g, t, options)).net;
}

inline FlowNetwork build_weighted_network(const CandidateGraph& g,
                                          const TargetDistribution& t, double mu) {
  return detail::build_weighted(g, t, mu).net;
}

inline FlowNetwork build_binary_cdg_network(const CandidateGraph& g,
                                            const TargetDistribution& t,
                                            const std::vector<char>& relevant,
                                            const SolveOptions& options = {}) {
  return detail::build_binary_cdg(g, t, relevant, detail::solve_first_pass(g, t, options))
      .net;
}

inline FlowNetwork build_full_cdg_network(const CandidateGraph& g,
                                          const TargetDistribution& t,
                                          const SolveOptions& options = {}) {
  return detail::build_full_cdg(g, t, detail::solve_first_pass(g, t, options)).net;
}

inline FlowNetwork build_category_network(const CandidateGraph& g,
                                          const TargetDistribution& t,
                                          const CategorySpec& cats) {
  return detail::build_category(g, t, cats).net;
}

inline FlowNetwork build_two_slope_network(const CandidateGraph& g,
                                           const TargetDistribution& t, int threshold,
                                           std::pair<int, int> slopes) {
  return detail::build_two_slope(g, t, {threshold, slopes.first, slopes.second}).net;
}

// --- solvers ----------------------------------------------------------------

/// MIN-DISCREPANCY(G, c, a): the flow cost of the Theorem-1 network is
/// exactly the minimum achievable discrepancy.
inline DiscrepancyResult min_discrepancy(const CandidateGraph& g,
                                         const TargetDistribution& t,
                                         const SolveOptions& options = {}) {
  detail::DiscrepancyNetwork dn = detail::build_base_network(g, t, 2, nullptr, true);
  const FlowSolution sol = detail::solve_or_throw(dn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, dn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  if (result.flow_cost != result.discrepancy) {
    throw InternalError("flow cost != recomputed discrepancy (" +
                        std::to_string(result.flow_cost) + " vs " +
                        std::to_string(result.discrepancy) + ")");
  }
  return result;
}

/// Aggregate diversity maximization: min discrepancy against the all-ones
/// target. The overflow accounting gives cost = 2*(sum c - items covered),
/// so the minimum cost flow maximizes coverage.
inline DiscrepancyResult max_aggdiv(const CandidateGraph& g,
                                    const SolveOptions& options = {}) {
  const TargetDistribution ones = detail::all_ones_target(g);
  detail::DiscrepancyNetwork dn = detail::build_base_network(g, ones, 2, nullptr, false);
  const FlowSolution sol = detail::solve_or_throw(dn.net, options);
  DiscrepancyResult result;
  if (g.total_display() < g.item_count) {
    result.warnings.push_back("display total below item count; full coverage unreachable");
  }
  result.subgraph = detail::extract_subgraph(g, dn.edge_arc, sol);
  detail::fill_common(result, ones, sol);
  if (result.flow_cost != 2 * (g.total_display() - result.items_covered)) {
    throw InternalError("aggregate-diversity cost identity failed");
  }
  return result;
}

/// Two-pass method: pass 1 finds the optimal discrepancy, pass 2 pins the
/// overflow to it and maximizes total relevance among optimal subgraphs.
inline DiscrepancyResult two_pass(const CandidateGraph& g, const TargetDistribution& t,
                                  const SolveOptions& options = {}) {
  const detail::PinnedDiscrepancy pass = detail::solve_first_pass(g, t, options);
  detail::DiscrepancyNetwork dn = detail::build_relevance_pass(g, t, pass);
  const FlowSolution sol = detail::solve_or_throw(dn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, dn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  if (result.discrepancy != pass.optimum) {
    throw InternalError("two-pass discrepancy " + std::to_string(result.discrepancy) +
                        " != first-pass optimum " + std::to_string(pass.optimum));
  }
  if (result.flow_cost != -result.total_relevance_fp) {
    throw InternalError("two-pass relevance accounting mismatch");
  }
  return result;
}

/// Single-solve bicriteria method minimizing
/// discrepancy - mu * total relevance. All costs share the micro-unit
/// scale: overflow arcs cost 2e6, candidate arcs -round(mu * rel * 1e6).
inline DiscrepancyResult weighted(const CandidateGraph& g, const TargetDistribution& t,
                                  double mu, const SolveOptions& options = {}) {
  detail::DiscrepancyNetwork dn = detail::build_weighted(g, t, mu);
  const FlowSolution sol = detail::solve_or_throw(dn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, dn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  long long charged = kWeightScale * result.discrepancy;
  for (int e : result.subgraph.chosen) {
    charged -= static_cast<long long>(
        std::llround(mu * static_cast<double>(g.edges[static_cast<std::size_t>(e)].weight_fp)));
  }
  if (result.flow_cost != charged) {
    throw InternalError("weighted-method cost accounting mismatch");
  }
  return result;
}

/// Maximizes binary cumulative discounted gain subject to optimal
/// discrepancy. `relevant[e]` flags the candidate edges that count; the
/// k-th relevant recommendation a user receives is worth 1/ln(k+1).
inline DiscrepancyResult binary_cdg(const CandidateGraph& g, const TargetDistribution& t,
                                    const std::vector<char>& relevant,
                                    const SolveOptions& options = {}) {
  const detail::PinnedDiscrepancy pass = detail::solve_first_pass(g, t, options);
  detail::BinaryCdgNetwork bn = detail::build_binary_cdg(g, t, relevant, pass);
  const FlowSolution sol = detail::solve_or_throw(bn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, bn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  if (result.discrepancy != pass.optimum) {
    throw InternalError("binary-CDG discrepancy drifted from the optimum");
  }
  std::vector<int> relevant_chosen(static_cast<std::size_t>(g.user_count), 0);
  for (int e : result.subgraph.chosen) {
    if (relevant[static_cast<std::size_t>(e)]) {
      ++relevant_chosen[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].user)];
    }
  }
  for (int u = 0; u < g.user_count; ++u) {
    for (int k = 1; k <= relevant_chosen[static_cast<std::size_t>(u)]; ++k) {
      result.gain_fp += slot_discount_fp(k);
    }
  }
  if (result.flow_cost != -result.gain_fp) {
    throw InternalError("binary-CDG gain accounting mismatch");
  }
  return result;
}

/// Maximizes full cumulative discounted gain subject to optimal
/// discrepancy. Needs a uniform display constant; the extracted
/// solution's per-user ranking is the flow's slot assignment.
inline DiscrepancyResult full_cdg(const CandidateGraph& g, const TargetDistribution& t,
                                  const SolveOptions& options = {}) {
  const detail::PinnedDiscrepancy pass = detail::solve_first_pass(g, t, options);
  detail::FullCdgNetwork fn = detail::build_full_cdg(g, t, pass);
  const int display = fn.display;
  const FlowSolution sol = detail::solve_or_throw(fn.net, options);
  DiscrepancyResult result;
  result.subgraph.parent = &g;
  result.subgraph.ranked.assign(static_cast<std::size_t>(g.user_count),
                                std::vector<int>(static_cast<std::size_t>(display), -1));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (sol.flow[static_cast<std::size_t>(fn.edge_arc[e])] <= 0) continue;
    result.subgraph.chosen.push_back(static_cast<int>(e));
    int assigned_slot = -1;
    for (int slot = 0; slot < display; ++slot) {
      if (sol.flow[static_cast<std::size_t>(
              fn.slot_edge_arc[e * static_cast<std::size_t>(display) +
                               static_cast<std::size_t>(slot)])] > 0) {
        assigned_slot = slot;
        break;
      }
    }
    if (assigned_slot < 0) throw InternalError("chosen edge lacks a slot assignment");
    result.subgraph.ranked[static_cast<std::size_t>(g.edges[e].user)]
                          [static_cast<std::size_t>(assigned_slot)] = static_cast<int>(e);
    result.gain_fp += discounted_gain_fp(g.edges[e].weight_fp, assigned_slot + 1);
  }
  for (auto& slots : result.subgraph.ranked) {
    for (int e : slots) {
      if (e < 0) throw InternalError("unused recommendation slot in full-CDG solution");
    }
  }
  check_solution_degrees(result.subgraph);
  detail::fill_common(result, t, sol);
  if (result.discrepancy != pass.optimum) {
    throw InternalError("full-CDG discrepancy drifted from the optimum");
  }
  if (result.flow_cost != -result.gain_fp) {
    throw InternalError("full-CDG gain accounting mismatch");
  }
  return result;
}

/// Discrepancy minimization with category floors: minimizes
/// sum_j |deg - a_j| + sum_i max(A_i - D_i, 0) where D_i counts the
/// recommendations landing in category i.
inline DiscrepancyResult min_discrepancy_with_categories(
    const CandidateGraph& g, const TargetDistribution& t, const CategorySpec& cats,
    const SolveOptions& options = {}) {
  detail::CategoryNetwork cn = detail::build_category(g, t, cats);
  const FlowSolution sol = detail::solve_or_throw(cn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, cn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  const std::vector<long long> deg = indegree_vector(result.subgraph);
  std::vector<long long> received(static_cast<std::size_t>(cats.category_count()), 0);
  for (int j = 0; j < g.item_count; ++j) {
    received[static_cast<std::size_t>(cats.category_of[static_cast<std::size_t>(j)])] +=
        deg[static_cast<std::size_t>(j)];
  }
  long long objective = result.discrepancy;
  for (int c = 0; c < cats.category_count(); ++c) {
    objective += std::max(cats.minimums[static_cast<std::size_t>(c)] -
                              received[static_cast<std::size_t>(c)],
                          0LL);
  }
  if (result.flow_cost != objective) {
    throw InternalError("category objective identity failed (" +
                        std::to_string(result.flow_cost) + " vs " +
                        std::to_string(objective) + ")");
  }
  return result;
}

/// Convex two-slope overflow penalty: an item's first a_j recommendations
/// are free, the next `threshold` cost 2*s1 each, anything beyond costs
/// 2*s2 each (s2 >= s1 keeps the pieces in convex order).
inline DiscrepancyResult two_slope(const CandidateGraph& g, const TargetDistribution& t,
                                   int threshold, std::pair<int, int> slopes,
                                   const SolveOptions& options = {}) {
  detail::DiscrepancyNetwork dn =
      detail::build_two_slope(g, t, {threshold, slopes.first, slopes.second});
  const FlowSolution sol = detail::solve_or_throw(dn.net, options);
  DiscrepancyResult result;
  result.subgraph = detail::extract_subgraph(g, dn.edge_arc, sol);
  detail::fill_common(result, t, sol);
  const std::vector<long long> deg = indegree_vector(result.subgraph);
  long long objective = 0;
  for (int j = 0; j < g.item_count; ++j) {
    const long long over =
        std::max(deg[static_cast<std::size_t>(j)] - t.counts[static_cast<std::size_t>(j)], 0LL);
    objective += 2LL * slopes.first * std::min<long long>(over, threshold) +
                 2LL * slopes.second * std::max<long long>(over - threshold, 0LL);
  }
  if (result.flow_cost != objective) {
    throw InternalError("two-slope objective identity failed");
  }
  return result;
}

}  // namespace recflow

#endif  // RECFLOW_CONSTRUCTIONS_HPP
