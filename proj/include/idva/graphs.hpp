#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 idva authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
//
//  Conflict digraph between agents and the bounded-out-degree colouring that
//  certifies the allocation's colour budget: a digraph whose every vertex
//  has out-degree at most k is properly (2k+1)-colourable, by repeatedly
//  peeling a vertex of total degree at most 2k.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/sos_mechanism.hpp>

#include <bit>
#include <deque>
#include <optional>
#include <vector>

namespace idva {

struct Digraph {
  std::size_t n = 0;
  std::vector<std::vector<AgentIndex>> out;

  std::size_t out_degree(AgentIndex v) const { return out[v].size(); }

  std::size_t max_out_degree() const {
    std::size_t m = 0;
    for (const auto& edges : out) m = std::max(m, edges.size());
    return m;
  }

  std::size_t num_edges() const {
    std::size_t m = 0;
    for (const auto& edges : out) m += edges.size();
    return m;
  }
};

/// Edge j -> i when agent j's value survives both of agent i's conflict
/// probes: v_j(s) >= v_i(s) and v_j(0_i, s_-i) < (1 - 1/log2 n) * v_i(s).
/// For submodular-over-signals instances the out-degree is at most log2 n.
inline Digraph build_feasibility_graph(const Instance& instance, QueryLedger* ledger = nullptr) {
  const std::size_t n = instance.n();
  Digraph g;
  g.n = n;
  g.out.resize(n);
  if (n < 2) return g;

  const double factor = sos::threshold_factor(n);
  std::vector<double> value(n);
  for (AgentIndex i = 0; i < n; ++i) {
    value[i] = evaluate(instance.oracles[i], instance.signals, ledger);
  }
  for (AgentIndex i = 0; i < n; ++i) {
    const SignalProfile zeroed = substitute(instance.signals, i, 0.0);
    for (AgentIndex j = 0; j < n; ++j) {
      if (j == i) continue;
      if (value[j] >= value[i] &&
          evaluate(instance.oracles[j], zeroed, ledger) < factor * value[i]) {
        g.out[j].push_back(i);
      }
    }
  }
  return g;
}

struct Coloring {
  std::vector<std::size_t> color;
  std::size_t num_colors = 0;
};

/// Proper colouring with at most 2k+1 colours for a digraph of out-degree
/// <= k (edges conflict in both directions).  Peels any vertex of total
/// degree <= 2k, then colours in reverse removal order with the smallest
/// colour absent among coloured neighbours.
inline Coloring greedy_coloring(const Digraph& g, std::size_t k) {
  for (AgentIndex v = 0; v < g.n; ++v) {
    if (g.out_degree(v) > k) {
      throw std::invalid_argument("vertex " + std::to_string(v) +
                                  " has out-degree above the bound");
    }
  }

  std::vector<std::vector<AgentIndex>> adjacent(g.n);
  for (AgentIndex u = 0; u < g.n; ++u) {
    for (AgentIndex w : g.out[u]) {
      adjacent[u].push_back(w);
      adjacent[w].push_back(u);
    }
  }

  std::vector<std::size_t> degree(g.n);
  std::vector<bool> removed(g.n, false);
  std::deque<AgentIndex> ready;
  for (AgentIndex v = 0; v < g.n; ++v) {
    degree[v] = adjacent[v].size();
    if (degree[v] <= 2 * k) ready.push_back(v);
  }

  std::vector<AgentIndex> order;
  order.reserve(g.n);
  while (!ready.empty()) {
    const AgentIndex v = ready.front();
    ready.pop_front();
    if (removed[v]) continue;
    removed[v] = true;
    order.push_back(v);
    for (AgentIndex w : adjacent[v]) {
      if (removed[w]) continue;
      if (--degree[w] == 2 * k) ready.push_back(w);
    }
  }
  if (order.size() != g.n) {
    throw std::logic_error("peeling stalled; some vertex kept total degree above 2k");
  }

  Coloring result;
  result.color.assign(g.n, 0);
  std::vector<bool> assigned(g.n, false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const AgentIndex v = *it;
    std::vector<bool> used(2 * k + 2, false);
    for (AgentIndex w : adjacent[v]) {
      if (assigned[w] && result.color[w] < used.size()) used[result.color[w]] = true;
    }
    std::size_t c = 0;
    while (used[c]) ++c;
    result.color[v] = c;
    assigned[v] = true;
    result.num_colors = std::max(result.num_colors, c + 1);
  }
  return result;
}

/// Independent edge scan: no edge may join two vertices of the same colour.
inline bool is_proper(const Digraph& g, const Coloring& coloring) {
  for (AgentIndex u = 0; u < g.n; ++u) {
    for (AgentIndex w : g.out[u]) {
      if (coloring.color[u] == coloring.color[w]) return false;
    }
  }
  return true;
}

struct ChiBoundReport {
  std::size_t max_out_degree = 0;
  std::size_t degree_bound = 0;  ///< floor(log2 n)
  bool out_degree_ok = false;
  std::optional<AgentIndex> violating_agent;
  std::size_t colors_used = 0;
  std::size_t color_bound = 0;   ///< 2*floor(log2 n) + 1
  bool ok = false;
};

/// Builds the conflict graph, checks the out-degree bound that the
/// submodularity argument promises, and colours it.  An out-degree
/// violation is reported, not thrown: it flags a non-submodular instance.
inline ChiBoundReport verify_chi_bound(const Instance& instance) {
  const Digraph g = build_feasibility_graph(instance);
  ChiBoundReport report;
  report.degree_bound = static_cast<std::size_t>(std::bit_width(instance.n()) - 1);
  report.color_bound = 2 * report.degree_bound + 1;
  report.max_out_degree = g.max_out_degree();
  report.out_degree_ok = report.max_out_degree <= report.degree_bound;
  if (!report.out_degree_ok) {
    for (AgentIndex v = 0; v < g.n; ++v) {
      if (g.out_degree(v) > report.degree_bound) {
        report.violating_agent = v;
        break;
      }
    }
  }
  const Coloring coloring =
      greedy_coloring(g, std::max(report.degree_bound, report.max_out_degree));
  report.colors_used = coloring.num_colors;
  report.ok = report.out_degree_ok && report.colors_used <= report.color_bound;
  return report;
}

}  // namespace idva
