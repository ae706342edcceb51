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

#ifndef RECFLOW_MIN_COST_FLOW_HPP
#define RECFLOW_MIN_COST_FLOW_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "recflow/common.hpp"

namespace recflow {

struct FlowArc {
  int tail = 0;
  int head = 0;
  long long lower = 0;
  long long capacity = 0;
  long long cost = 0;
};

/// Directed network with node supplies (negative = demand) and arcs
/// carrying lower bounds, capacities and integer costs. "Infinite"
/// capacities must be substituted with `infinite_capacity()` before
/// solving; no integral flow can exceed the total positive supply.
class FlowNetwork {
 public:
  std::vector<long long> supply;
  std::vector<FlowArc> arcs;

  int add_node(long long node_supply = 0) {
    supply.push_back(node_supply);
    return static_cast<int>(supply.size()) - 1;
  }

  int add_arc(int tail, int head, long long lower, long long capacity, long long cost) {
    if (lower < 0 || capacity < lower) {
      throw DataError("arc bounds must satisfy 0 <= lower <= capacity");
    }
    arcs.push_back(FlowArc{tail, head, lower, capacity, cost});
    return static_cast<int>(arcs.size()) - 1;
  }

  int node_count() const { return static_cast<int>(supply.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }

  long long infinite_capacity() const {
    long long total = 0;
    for (long long b : supply) {
      if (b > 0) total += b;
    }
    return total;
  }
};

enum class SolveStatus { optimal, infeasible };

struct FlowSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<long long> flow;       // per arc, lower bounds included
  std::vector<long long> potential;  // final node potentials (certificate)
  long long cost = 0;
};

struct SolveOptions {
  // Capacity-scaling outer loop; disable for the plain successive
  // shortest path variant (differential testing).
  bool capacity_scaling = true;
};

/// Pins an arc to carry exactly `value` units (lower = capacity = value).
inline FlowNetwork fix_arc_flow(const FlowNetwork& net, int arc, long long value) {
  if (arc < 0 || arc >= net.arc_count()) throw DataError("arc id out of range");
  if (value < 0 || value > net.arcs[static_cast<std::size_t>(arc)].capacity) {
    throw DataError("fixed flow value outside [0, capacity]");
  }
  FlowNetwork out = net;
  out.arcs[static_cast<std::size_t>(arc)].lower = value;
  out.arcs[static_cast<std::size_t>(arc)].capacity = value;
  return out;
}

/// Checks bounds, conservation and the complementary-slackness
/// certificate (every residual arc has nonnegative reduced cost).
/// Throws InternalError on violation.
inline void verify_solution(const FlowNetwork& net, const FlowSolution& sol) {
  if (sol.status != SolveStatus::optimal) return;
  std::vector<long long> balance = net.supply;
  long long cost = 0;
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const FlowArc& arc = net.arcs[a];
    const long long f = sol.flow[a];
    if (f < arc.lower || f > arc.capacity) {
      throw InternalError("flow bound violated on arc " + std::to_string(a));
    }
    balance[static_cast<std::size_t>(arc.tail)] -= f;
    balance[static_cast<std::size_t>(arc.head)] += f;
    cost += f * arc.cost;
    const long long reduced = arc.cost + sol.potential[static_cast<std::size_t>(arc.tail)] -
                              sol.potential[static_cast<std::size_t>(arc.head)];
    if (f < arc.capacity && reduced < 0) {
      throw InternalError("negative reduced cost on residual arc " + std::to_string(a));
    }
    if (f > arc.lower && reduced > 0) {
      throw InternalError("positive reduced cost on used arc " + std::to_string(a));
    }
  }
  for (std::size_t v = 0; v < balance.size(); ++v) {
    if (balance[v] != 0) {
      throw InternalError("flow conservation violated at node " + std::to_string(v));
    }
  }
  if (cost != sol.cost) throw InternalError("flow cost accounting mismatch");
}

namespace detail {

// Successive shortest augmenting paths over reduced costs with an
// optional capacity-scaling outer loop (saturate-and-augment phases).
// Lower bounds are folded into the node imbalances up front; negative
// arc costs are absorbed by one label-correcting potential pass.
class MinCostFlowSolver {
 public:
  MinCostFlowSolver(const FlowNetwork& net, const SolveOptions& options)
      : net_(net), options_(options), n_(net.node_count()) {}

  FlowSolution run() {
    long long supply_sum = 0;
    for (long long b : net_.supply) supply_sum += b;
    if (supply_sum != 0) {
      throw DataError("node supplies must sum to zero (got " +
                      std::to_string(supply_sum) + ")");
    }
    build_residual();
    initialize_potentials();

    long long max_excess = 0;
    for (long long e : excess_) max_excess = std::max(max_excess, e);
    long long delta = 1;
    if (options_.capacity_scaling) {
      while (delta * 2 <= max_excess) delta *= 2;
    }

    bool feasible = true;
    for (; delta >= 1; delta /= 2) {
      saturate_negative_arcs(delta);
      if (!augment_phase(delta)) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      for (long long e : excess_) {
        if (e != 0) {
          feasible = false;
          break;
        }
      }
    }

    FlowSolution sol;
    sol.potential = pi_;
    if (!feasible) {
      sol.status = SolveStatus::infeasible;
      return sol;
    }
    sol.status = SolveStatus::optimal;
    sol.flow.resize(net_.arcs.size());
    sol.cost = 0;
    for (std::size_t a = 0; a < net_.arcs.size(); ++a) {
      const FlowArc& arc = net_.arcs[a];
      const long long shipped = (arc.capacity - arc.lower) - cap_[2 * a];
      sol.flow[a] = shipped + arc.lower;
      sol.cost += sol.flow[a] * arc.cost;
    }
    verify_solution(net_, sol);
    return sol;
  }

 private:
  static constexpr long long kInfinity = std::numeric_limits<long long>::max() / 4;

  void build_residual() {
    const std::size_t m = net_.arcs.size();
    cap_.assign(2 * m, 0);
    cost_.assign(2 * m, 0);
    to_.assign(2 * m, 0);
    excess_ = net_.supply;
    std::vector<int> degree(static_cast<std::size_t>(n_), 0);
    for (std::size_t a = 0; a < m; ++a) {
      const FlowArc& arc = net_.arcs[a];
      cap_[2 * a] = arc.capacity - arc.lower;
      cap_[2 * a + 1] = 0;
      cost_[2 * a] = arc.cost;
      cost_[2 * a + 1] = -arc.cost;
      to_[2 * a] = arc.head;
      to_[2 * a + 1] = arc.tail;
      excess_[static_cast<std::size_t>(arc.tail)] -= arc.lower;
      excess_[static_cast<std::size_t>(arc.head)] += arc.lower;
      ++degree[static_cast<std::size_t>(arc.tail)];
      ++degree[static_cast<std::size_t>(arc.head)];
    }
    // CSR adjacency over residual arc ids, per node in arc order.
    first_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int v = 0; v < n_; ++v) {
      first_[static_cast<std::size_t>(v) + 1] =
          first_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
    }
    adjacency_.resize(2 * m);
    std::vector<std::size_t> cursor(first_.begin(), first_.end() - 1);
    for (std::size_t a = 0; a < m; ++a) {
      adjacency_[cursor[static_cast<std::size_t>(net_.arcs[a].tail)]++] =
          static_cast<int>(2 * a);
      adjacency_[cursor[static_cast<std::size_t>(net_.arcs[a].head)]++] =
          static_cast<int>(2 * a + 1);
    }
  }

  int rev(int rid) const { return rid ^ 1; }
  int tail_of(int rid) const { return to_[static_cast<std::size_t>(rev(rid))]; }

  // Label-correcting pass so that every residual arc starts with
  // nonnegative reduced cost even when input costs are negative.
  void initialize_potentials() {
    pi_.assign(static_cast<std::size_t>(n_), 0);
    bool changed = true;
    for (int pass = 0; pass <= n_ && changed; ++pass) {
      changed = false;
      for (std::size_t rid = 0; rid < cap_.size(); ++rid) {
        if (cap_[rid] <= 0) continue;
        const int u = tail_of(static_cast<int>(rid));
        const int v = to_[rid];
        const long long candidate = pi_[static_cast<std::size_t>(u)] + cost_[rid];
        if (candidate < pi_[static_cast<std::size_t>(v)]) {
          pi_[static_cast<std::size_t>(v)] = candidate;
          changed = true;
        }
      }
    }
    if (changed) throw DataError("network contains a negative-cost cycle");
  }

  void saturate_negative_arcs(long long delta) {
    for (std::size_t rid = 0; rid < cap_.size(); ++rid) {
      if (cap_[rid] < delta) continue;
      const int u = tail_of(static_cast<int>(rid));
      const int v = to_[rid];
      const long long reduced =
          cost_[rid] + pi_[static_cast<std::size_t>(u)] - pi_[static_cast<std::size_t>(v)];
      if (reduced < 0) {
        const long long amount = cap_[rid];
        cap_[rid] = 0;
        cap_[static_cast<std::size_t>(rev(static_cast<int>(rid)))] += amount;
        excess_[static_cast<std::size_t>(u)] -= amount;
        excess_[static_cast<std::size_t>(v)] += amount;
      }
    }
  }

  // Routes excess >= delta to deficits <= -delta along shortest reduced-
  // cost paths in the delta-residual network. Returns false only when the
  // delta == 1 phase gets stuck, which certifies infeasibility.
  bool augment_phase(long long delta) {
    std::set<int> sources;
    std::set<int> sinks;
    is_sink_.assign(static_cast<std::size_t>(n_), false);
    for (int v = 0; v < n_; ++v) {
      if (excess_[static_cast<std::size_t>(v)] >= delta) sources.insert(v);
      if (excess_[static_cast<std::size_t>(v)] <= -delta) {
        sinks.insert(v);
        is_sink_[static_cast<std::size_t>(v)] = true;
      }
    }
    while (!sources.empty() && !sinks.empty()) {
      const int source = *sources.begin();
      const int target = shortest_paths(source, delta);
      if (target < 0) {
        if (delta == 1) return false;  // reachable deficits exhausted
        break;
      }
      augment(source, target);
      if (excess_[static_cast<std::size_t>(source)] < delta) sources.erase(source);
      if (excess_[static_cast<std::size_t>(target)] > -delta) {
        sinks.erase(target);
        is_sink_[static_cast<std::size_t>(target)] = false;
      }
    }
    return true;
  }

  // Dijkstra over reduced costs restricted to residual capacity >= delta;
  // stops once the nearest sink is settled (sinks win distance ties, then
  // lower node id). Updates potentials so that path arcs become tight.
  // Returns the settled sink or -1.
  int shortest_paths(int source, long long delta) {
    dist_.assign(static_cast<std::size_t>(n_), kInfinity);
    prev_arc_.assign(static_cast<std::size_t>(n_), -1);
    settled_.assign(static_cast<std::size_t>(n_), false);
    using Entry = std::tuple<long long, int, int>;  // (dist, non-sink, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    dist_[static_cast<std::size_t>(source)] = 0;
    heap.emplace(0, is_sink_[static_cast<std::size_t>(source)] ? 0 : 1, source);
    int found = -1;
    while (!heap.empty()) {
      const auto [d, nonsink, u] = heap.top();
      heap.pop();
      (void)nonsink;
      if (settled_[static_cast<std::size_t>(u)]) continue;
      settled_[static_cast<std::size_t>(u)] = true;
      if (is_sink_[static_cast<std::size_t>(u)]) {
        found = u;
        break;
      }
      for (std::size_t idx = first_[static_cast<std::size_t>(u)];
           idx < first_[static_cast<std::size_t>(u) + 1]; ++idx) {
        const int rid = adjacency_[idx];
        if (cap_[static_cast<std::size_t>(rid)] < delta) continue;
        const int v = to_[static_cast<std::size_t>(rid)];
        if (settled_[static_cast<std::size_t>(v)]) continue;
        const long long reduced = cost_[static_cast<std::size_t>(rid)] +
                                  pi_[static_cast<std::size_t>(u)] -
                                  pi_[static_cast<std::size_t>(v)];
        const long long candidate = d + reduced;
        if (candidate < dist_[static_cast<std::size_t>(v)]) {
          dist_[static_cast<std::size_t>(v)] = candidate;
          prev_arc_[static_cast<std::size_t>(v)] = rid;
          heap.emplace(candidate, is_sink_[static_cast<std::size_t>(v)] ? 0 : 1, v);
        }
      }
    }
    if (found < 0) return -1;
    const long long horizon = dist_[static_cast<std::size_t>(found)];
    for (int v = 0; v < n_; ++v) {
      pi_[static_cast<std::size_t>(v)] += std::min(dist_[static_cast<std::size_t>(v)], horizon);
    }
    return found;
  }

  void augment(int source, int target) {
    long long amount = std::min(excess_[static_cast<std::size_t>(source)],
                                -excess_[static_cast<std::size_t>(target)]);
    for (int v = target; v != source;) {
      const int rid = prev_arc_[static_cast<std::size_t>(v)];
      amount = std::min(amount, cap_[static_cast<std::size_t>(rid)]);
      v = tail_of(rid);
    }
    for (int v = target; v != source;) {
      const int rid = prev_arc_[static_cast<std::size_t>(v)];
      cap_[static_cast<std::size_t>(rid)] -= amount;
      cap_[static_cast<std::size_t>(rev(rid))] += amount;
      v = tail_of(rid);
    }
    excess_[static_cast<std::size_t>(source)] -= amount;
    excess_[static_cast<std::size_t>(target)] += amount;
  }

  const FlowNetwork& net_;
  SolveOptions options_;
  int n_;
  std::vector<long long> cap_;
  std::vector<long long> cost_;
  std::vector<int> to_;
  std::vector<std::size_t> first_;
  std::vector<int> adjacency_;
  std::vector<long long> excess_;
  std::vector<long long> pi_;
  std::vector<long long> dist_;
  std::vector<int> prev_arc_;
  std::vector<char> settled_;
  std::vector<char> is_sink_;
};

}  // namespace detail

/// Integral minimum-cost flow. Deterministic for a fixed arc ordering;
/// unbalanced supplies throw, an infeasible instance is reported in the
/// returned status. The solution carries the final potentials and has
/// already passed the reduced-cost certificate.
inline FlowSolution solve_min_cost_flow(const FlowNetwork& net,
                                        const SolveOptions& options = {}) {
  detail::MinCostFlowSolver solver(net, options);
  return solver.run();
}

}  // namespace recflow

#endif  // RECFLOW_MIN_COST_FLOW_HPP
