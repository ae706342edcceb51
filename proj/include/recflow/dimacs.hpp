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

#ifndef RECFLOW_DIMACS_HPP
#define RECFLOW_DIMACS_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "recflow/common.hpp"
#include "recflow/min_cost_flow.hpp"

namespace recflow {

// Standard DIMACS min-cost flow exchange format, 1-based node ids:
//   p min <nodes> <arcs>
//   n <id> <supply>            (only nonzero supplies)
//   a <src> <dst> <low> <cap> <cost>
// Arcs are emitted in network order, so write -> read -> write is
// byte-identical.

inline void write_dimacs(const FlowNetwork& net, std::ostream& out) {
  out << "p min " << net.node_count() << ' ' << net.arc_count() << '\n';
  for (int v = 0; v < net.node_count(); ++v) {
    if (net.supply[static_cast<std::size_t>(v)] != 0) {
      out << "n " << v + 1 << ' ' << net.supply[static_cast<std::size_t>(v)] << '\n';
    }
  }
  for (const FlowArc& arc : net.arcs) {
    out << "a " << arc.tail + 1 << ' ' << arc.head + 1 << ' ' << arc.lower << ' '
        << arc.capacity << ' ' << arc.cost << '\n';
  }
}

inline FlowNetwork read_dimacs(std::istream& in) {
  FlowNetwork net;
  std::string line;
  std::size_t line_number = 0;
  bool have_problem = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream row(line);
    char kind = 0;
    row >> kind;
    if (kind == 'p') {
      std::string problem;
      int nodes = 0, arcs = 0;
      if (!(row >> problem >> nodes >> arcs) || problem != "min") {
        throw DataError("bad DIMACS problem line at line " + std::to_string(line_number));
      }
      net.supply.assign(static_cast<std::size_t>(nodes), 0);
      net.arcs.reserve(static_cast<std::size_t>(arcs));
      have_problem = true;
    } else if (kind == 'n') {
      int id = 0;
      long long supply = 0;
      if (!have_problem || !(row >> id >> supply) || id < 1 ||
          id > net.node_count()) {
        throw DataError("bad DIMACS node line at line " + std::to_string(line_number));
      }
      net.supply[static_cast<std::size_t>(id - 1)] = supply;
    } else if (kind == 'a') {
      int tail = 0, head = 0;
      long long lower = 0, capacity = 0, cost = 0;
      if (!have_problem || !(row >> tail >> head >> lower >> capacity >> cost) ||
          tail < 1 || tail > net.node_count() || head < 1 || head > net.node_count()) {
        throw DataError("bad DIMACS arc line at line " + std::to_string(line_number));
      }
      net.add_arc(tail - 1, head - 1, lower, capacity, cost);
    } else {
      throw DataError("unknown DIMACS record '" + std::string(1, kind) +
                      "' at line " + std::to_string(line_number));
    }
  }
  if (!have_problem) throw DataError("missing DIMACS problem line");
  return net;
}

}  // namespace recflow

#endif  // RECFLOW_DIMACS_HPP
