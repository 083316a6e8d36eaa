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
//  Ex-post incentive-compatible single-item mechanism for valuations with
//  bounded signal dependency: when every declared dependency set has size at
//  most k, the expected welfare is within a factor 2(k+1) of optimal.
//
//  Agent i competes against the zeroed-own-signal values of everyone else;
//  the candidate rule breaks exact ties lexicographically (equality passes
//  only against higher-indexed agents), which is what keeps the winners an
//  independent set of the dependency graph.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/rng.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace idva::kdep {

/// Declared dependency structure: edge i -> j when j is in agent i's
/// declared set B_i.  Declarations are the source of truth; see audit below.
struct DependencyGraph {
  std::size_t n = 0;
  std::vector<std::vector<AgentIndex>> deps;          ///< B_i, sorted
  std::vector<std::vector<AgentIndex>> predecessors;  ///< {j : i in B_j}
  std::size_t k = 0;                                  ///< max |B_i|

  std::size_t out_degree(AgentIndex i) const { return deps[i].size(); }
};

inline DependencyGraph build_dependency_graph(const Instance& instance) {
  DependencyGraph g;
  g.n = instance.n();
  g.deps.resize(g.n);
  g.predecessors.resize(g.n);
  for (AgentIndex i = 0; i < g.n; ++i) {
    const auto& declared = instance.oracles[i].declared_deps();
    if (!declared) {
      throw std::invalid_argument("agent " + std::to_string(i) +
                                  " has no dependency declaration");
    }
    g.deps[i] = *declared;
    g.k = std::max(g.k, g.deps[i].size());
    for (AgentIndex j : g.deps[i]) g.predecessors[j].push_back(i);
  }
  return g;
}

/// thresholds[j] = v_j(0_i, s_-i) for j != i (NaN at i): the values everyone
/// else would report if agent i's signal were floored.  Never queries with
/// agent i's own signal in place.
inline std::vector<double> thresholds(const Instance& instance, AgentIndex i,
                                      QueryLedger* ledger = nullptr) {
  const std::size_t n = instance.n();
  if (i >= n) throw std::out_of_range("agent index out of range");
  std::vector<double> t(n, std::numeric_limits<double>::quiet_NaN());
  const SignalProfile zeroed = substitute(instance.signals, i, 0.0);
  for (AgentIndex j = 0; j < n; ++j) {
    if (j != i) t[j] = evaluate(instance.oracles[j], zeroed, ledger);
  }
  return t;
}

/// Candidate rule: w must beat every threshold, where an exact tie counts
/// as a win only against a higher-indexed agent.
inline bool clears_thresholds(double w, const std::vector<double>& t, AgentIndex i) {
  for (AgentIndex j = 0; j < t.size(); ++j) {
    if (j == i) continue;
    if (w > t[j]) continue;
    if (w == t[j] && i < j) continue;
    return false;
  }
  return true;
}

/// Candidate share: half of 1/(max out-degree over predecessors + 1);
/// agents nobody depends on get the full 1/2.
inline double candidate_share(const DependencyGraph& g, AgentIndex i) {
  std::size_t worst = 0;
  for (AgentIndex j : g.predecessors[i]) worst = std::max(worst, g.out_degree(j));
  return 0.5 / static_cast<double>(worst + 1);
}

struct Candidates {
  std::vector<bool> member;
  std::vector<double> w_star;  ///< max competing threshold per agent (0 when n == 1)
};

inline Candidates candidates(const Instance& instance, QueryLedger* ledger = nullptr) {
  const std::size_t n = instance.n();
  Candidates c;
  c.member.assign(n, false);
  c.w_star.assign(n, 0.0);
  for (AgentIndex i = 0; i < n; ++i) {
    const double w = evaluate(instance.oracles[i], instance.signals, ledger);
    if (n == 1) {
      c.member[i] = true;
      continue;
    }
    const std::vector<double> t = thresholds(instance, i, ledger);
    c.member[i] = clears_thresholds(w, t, i);
    double top = -std::numeric_limits<double>::infinity();
    for (AgentIndex j = 0; j < n; ++j) {
      if (j != i) top = std::max(top, t[j]);
    }
    c.w_star[i] = top;
  }
  return c;
}

inline MechanismOutcome run(const Instance& instance) {
  const std::size_t n = instance.n();
  QueryLedger ledger(n);

  if (n == 1) {
    MechanismOutcome outcome;
    outcome.allocation = {1.0};
    outcome.payments = {0.0};
    outcome.ledger = std::move(ledger);
    outcome.diagnostics = Json{{"mechanism", "kdep"}, {"k", 0}, {"candidates", Json::array({0})}};
    return outcome;
  }

  const DependencyGraph graph = build_dependency_graph(instance);
  const Candidates cand = candidates(instance, &ledger);

  std::vector<double> x(n, 0.0), p(n, 0.0);
  std::vector<AgentIndex> winners;
  for (AgentIndex i = 0; i < n; ++i) {
    if (!cand.member[i]) continue;
    winners.push_back(i);
    const double q = candidate_share(graph, i);
    x[i] = q;
    p[i] = q * cand.w_star[i];
  }

  std::vector<std::size_t> out_degrees(n);
  for (AgentIndex i = 0; i < n; ++i) out_degrees[i] = graph.out_degree(i);

  MechanismOutcome outcome;
  outcome.allocation = std::move(x);
  outcome.payments = std::move(p);
  outcome.diagnostics = Json{{"mechanism", "kdep"},
                             {"k", graph.k},
                             {"deps", graph.deps},
                             {"out_degrees", out_degrees},
                             {"candidates", winners}};
  outcome.ledger = std::move(ledger);
  return outcome;
}

//------------------------------------------------------------------------------
// declaration audit
//------------------------------------------------------------------------------

/// Sampled check of declared dependency sets.  An observed dependence on an
/// undeclared signal is an error (the mechanism's guarantees are void); a
/// declared dependency that never moves the value is only flagged.
struct AuditFinding {
  AgentIndex agent = 0;
  AgentIndex signal = 0;
  SignalProfile profile;
  double changed_to = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
};

struct AuditReport {
  std::vector<AuditFinding> undeclared;       ///< dependence outside the declaration
  std::vector<std::pair<AgentIndex, AgentIndex>> unused;  ///< declared but never observed
  std::size_t samples = 0;

  bool ok() const { return undeclared.empty(); }
};

inline AuditReport audit_declarations(const Instance& instance, std::size_t samples = 100,
                                      std::uint64_t seed = 7) {
  const std::size_t n = instance.n();
  AuditReport report;
  report.samples = samples;

  std::vector<std::vector<bool>> declared(n, std::vector<bool>(n, false));
  std::vector<std::vector<bool>> observed(n, std::vector<bool>(n, false));
  for (AgentIndex i = 0; i < n; ++i) {
    const auto& deps = instance.oracles[i].declared_deps();
    if (!deps) {
      throw std::invalid_argument("agent " + std::to_string(i) +
                                  " has no dependency declaration");
    }
    for (AgentIndex j : *deps) declared[i][j] = true;
  }

  SplitMix64 rng = derive_stream(seed, {0x6b646570u, n});
  for (std::size_t trial = 0; trial < samples; ++trial) {
    std::vector<double> point(n);
    for (std::size_t d = 0; d < n; ++d) point[d] = rng.next_double();
    const SignalProfile s(point);
    for (AgentIndex i = 0; i < n; ++i) {
      const double before = instance.oracles[i].value(s);
      for (AgentIndex j = 0; j < n; ++j) {
        if (j == i) continue;
        const double flipped = s[j] < 0.5 ? 1.0 : 0.0;
        const SignalProfile probe = substitute(s, j, flipped);
        const double after = instance.oracles[i].value(probe);
        if (after != before) {
          observed[i][j] = true;
          if (!declared[i][j]) {
            report.undeclared.push_back({i, j, s, flipped, before, after});
          }
        }
      }
    }
  }

  for (AgentIndex i = 0; i < n; ++i) {
    for (AgentIndex j = 0; j < n; ++j) {
      if (declared[i][j] && !observed[i][j]) report.unused.emplace_back(i, j);
    }
  }
  return report;
}

}  // namespace idva::kdep
