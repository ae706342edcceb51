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

#ifndef RECFLOW_GRAPH_HPP
#define RECFLOW_GRAPH_HPP

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "recflow/common.hpp"

namespace recflow {

struct CandidateEdge {
  int user = 0;
  int item = 0;
  double weight = 0.0;  // relevance in [0,1]
  Fixed weight_fp = 0;  // the same weight in micro-units; authoritative for costs
};

/// Weighted bipartite supergraph of permissible recommendations.
/// Edges are sorted by (user, item) and unique; `offsets` is the CSR row
/// index per user. `display[u]` is the number of recommendations user u
/// must receive. Immutable once built.
class CandidateGraph {
 public:
  int user_count = 0;
  int item_count = 0;
  std::vector<CandidateEdge> edges;
  std::vector<int> display;
  std::vector<std::size_t> offsets;

  // Sorts, deduplicates and validates; call after filling the fields.
  void finalize() {
    std::sort(edges.begin(), edges.end(), [](const CandidateEdge& a, const CandidateEdge& b) {
      return a.user != b.user ? a.user < b.user : a.item < b.item;
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i].user == edges[i - 1].user && edges[i].item == edges[i - 1].item) {
        throw DataError("duplicate candidate edge (" + std::to_string(edges[i].user) +
                        ", " + std::to_string(edges[i].item) + ")");
      }
    }
    for (const CandidateEdge& e : edges) {
      if (e.user < 0 || e.user >= user_count || e.item < 0 || e.item >= item_count) {
        throw DataError("candidate edge endpoint out of range");
      }
      if (e.weight_fp < 0 || e.weight_fp > kWeightScale) {
        throw DataError("candidate edge weight outside [0,1]");
      }
    }
    if (static_cast<int>(display.size()) != user_count) {
      throw DataError("display vector length != user count");
    }
    offsets.assign(static_cast<std::size_t>(user_count) + 1, 0);
    for (const CandidateEdge& e : edges) {
      ++offsets[static_cast<std::size_t>(e.user) + 1];
    }
    for (std::size_t u = 1; u < offsets.size(); ++u) offsets[u] += offsets[u - 1];
  }

  int out_degree(int user) const {
    return static_cast<int>(offsets[static_cast<std::size_t>(user) + 1] -
                            offsets[static_cast<std::size_t>(user)]);
  }

  long long total_display() const {
    return std::accumulate(display.begin(), display.end(), 0LL);
  }

  std::vector<long long> supergraph_indegrees() const {
    std::vector<long long> deg(static_cast<std::size_t>(item_count), 0);
    for (const CandidateEdge& e : edges) ++deg[static_cast<std::size_t>(e.item)];
    return deg;
  }
};

/// Users whose candidate count falls short of their display constraint.
/// Empty result means the instance is feasible.
inline std::vector<int> validate_feasible(const CandidateGraph& g) {
  std::vector<int> deficient;
  for (int u = 0; u < g.user_count; ++u) {
    if (g.out_degree(u) < g.display[static_cast<std::size_t>(u)]) deficient.push_back(u);
  }
  return deficient;
}

inline void require_feasible(const CandidateGraph& g) {
  const std::vector<int> bad = validate_feasible(g);
  if (bad.empty()) return;
  std::string msg = "display constraint exceeds candidate count for users:";
  for (std::size_t i = 0; i < bad.size() && i < 16; ++i) {
    msg += ' ' + std::to_string(bad[i]);
  }
  if (bad.size() > 16) msg += " ... (" + std::to_string(bad.size()) + " total)";
  throw InfeasibleError(msg);
}

/// Opt-in repair: display[u] <- min(display[u], out_degree(u)).
/// Targets must be regenerated afterwards, since the total changes.
inline CandidateGraph clamp_display(const CandidateGraph& g) {
  CandidateGraph out = g;
  for (int u = 0; u < out.user_count; ++u) {
    out.display[static_cast<std::size_t>(u)] =
        std::min(out.display[static_cast<std::size_t>(u)], out.out_degree(u));
  }
  return out;
}

/// A selection of candidate edges with exactly display[u] edges per user.
/// `ranked[u]` lists the chosen edge indices in recommendation-slot order.
struct SolutionSubgraph {
  const CandidateGraph* parent = nullptr;
  std::vector<int> chosen;                // edge indices, ascending
  std::vector<std::vector<int>> ranked;   // per user, slot order

  // Default slot order: by descending weight, ties by ascending item id.
  void rank_by_weight() {
    ranked.assign(static_cast<std::size_t>(parent->user_count), {});
    for (int e : chosen) {
      ranked[static_cast<std::size_t>(parent->edges[static_cast<std::size_t>(e)].user)]
          .push_back(e);
    }
    for (auto& slots : ranked) {
      std::sort(slots.begin(), slots.end(), [this](int a, int b) {
        const CandidateEdge& ea = parent->edges[static_cast<std::size_t>(a)];
        const CandidateEdge& eb = parent->edges[static_cast<std::size_t>(b)];
        return ea.weight_fp != eb.weight_fp ? ea.weight_fp > eb.weight_fp
                                            : ea.item < eb.item;
      });
    }
  }

  Fixed total_relevance_fp() const {
    Fixed total = 0;
    for (int e : chosen) total += parent->edges[static_cast<std::size_t>(e)].weight_fp;
    return total;
  }
};

/// Exact per-item multiplicities of the chosen edges.
inline std::vector<long long> indegree_vector(const SolutionSubgraph& h) {
  std::vector<long long> deg(static_cast<std::size_t>(h.parent->item_count), 0);
  for (int e : h.chosen) {
    ++deg[static_cast<std::size_t>(h.parent->edges[static_cast<std::size_t>(e)].item)];
  }
  return deg;
}

inline void check_solution_degrees(const SolutionSubgraph& h) {
  std::vector<int> out(static_cast<std::size_t>(h.parent->user_count), 0);
  for (int e : h.chosen) {
    ++out[static_cast<std::size_t>(h.parent->edges[static_cast<std::size_t>(e)].user)];
  }
  for (int u = 0; u < h.parent->user_count; ++u) {
    if (out[static_cast<std::size_t>(u)] != h.parent->display[static_cast<std::size_t>(u)]) {
      throw InternalError("solution out-degree mismatch at user " + std::to_string(u));
    }
  }
}

// --- serialization -------------------------------------------------------
// Header "#l=<l> r=<r> c=<c1,...>" then one "u\tv\tweight" line per edge.
// Weights round-trip bit-exactly through their fixed-point form.

inline void write_graph_tsv(const CandidateGraph& g, std::ostream& out) {
  out << "#l=" << g.user_count << " r=" << g.item_count << " c=";
  for (std::size_t u = 0; u < g.display.size(); ++u) {
    if (u) out << ',';
    out << g.display[u];
  }
  out << '\n';
  for (const CandidateEdge& e : g.edges) {
    out << e.user << '\t' << e.item << '\t' << format_fixed(e.weight_fp) << '\n';
  }
}

inline CandidateGraph read_graph_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty graph file");
  CandidateGraph g;
  {
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
      if (token.rfind("#l=", 0) == 0) {
        g.user_count = std::stoi(token.substr(3));
      } else if (token.rfind("r=", 0) == 0) {
        g.item_count = std::stoi(token.substr(2));
      } else if (token.rfind("c=", 0) == 0) {
        std::istringstream list(token.substr(2));
        std::string num;
        while (std::getline(list, num, ',')) g.display.push_back(std::stoi(num));
      }
    }
    if (g.user_count <= 0 || g.item_count <= 0 ||
        static_cast<int>(g.display.size()) != g.user_count) {
      throw DataError("bad graph header: '" + line + "'");
    }
  }
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    CandidateEdge e;
    std::string weight_text;
    if (!(row >> e.user >> e.item >> weight_text)) {
      throw DataError("malformed graph edge at line " + std::to_string(line_number));
    }
    e.weight_fp = parse_fixed(weight_text);
    e.weight = from_fixed(e.weight_fp);
    g.edges.push_back(e);
  }
  g.finalize();
  return g;
}

// Solution rows are "user\titem\tslot"; slot is the 1-based rank.
inline void write_solution_tsv(const SolutionSubgraph& h, std::ostream& out) {
  for (std::size_t u = 0; u < h.ranked.size(); ++u) {
    for (std::size_t slot = 0; slot < h.ranked[u].size(); ++slot) {
      const CandidateEdge& e =
          h.parent->edges[static_cast<std::size_t>(h.ranked[u][slot])];
      out << e.user << '\t' << e.item << '\t' << slot + 1 << '\n';
    }
  }
}

inline SolutionSubgraph read_solution_tsv(const CandidateGraph& g, std::istream& in) {
  SolutionSubgraph h;
  h.parent = &g;
  h.ranked.assign(static_cast<std::size_t>(g.user_count), {});
  std::vector<std::vector<std::pair<int, int>>> slots(
      static_cast<std::size_t>(g.user_count));
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int u = 0, v = 0, slot = 0;
    if (!(row >> u >> v >> slot)) {
      throw DataError("malformed solution row at line " + std::to_string(line_number));
    }
    const std::size_t begin = g.offsets[static_cast<std::size_t>(u)];
    const std::size_t end = g.offsets[static_cast<std::size_t>(u) + 1];
    int edge = -1;
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (g.edges[idx].item == v) {
        edge = static_cast<int>(idx);
        break;
      }
    }
    if (edge < 0) {
      throw DataError("solution edge (" + std::to_string(u) + ", " + std::to_string(v) +
                      ") is not a candidate");
    }
    slots[static_cast<std::size_t>(u)].emplace_back(slot, edge);
  }
  for (std::size_t u = 0; u < slots.size(); ++u) {
    std::sort(slots[u].begin(), slots[u].end());
    for (const auto& [slot, edge] : slots[u]) {
      h.ranked[u].push_back(edge);
      h.chosen.push_back(edge);
    }
  }
  std::sort(h.chosen.begin(), h.chosen.end());
  return h;
}

}  // namespace recflow

#endif  // RECFLOW_GRAPH_HPP
