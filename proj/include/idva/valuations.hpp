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
//  Grid-based property checks for valuation oracles (signal substitutes and
//  single crossing) plus the named fixture instances used across the tests.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace idva {

struct CheckViolation {
  AgentIndex coordinate = 0;             ///< coordinate receiving the own-signal step
  std::optional<AgentIndex> other;       ///< competing agent (single crossing only)
  SignalProfile base;                    ///< lower profile, step coordinate at its low value
  SignalProfile comparison;              ///< raised-others profile (substitutes check)
  double delta = 0.0;
  double lhs = 0.0;                      ///< marginal that should dominate
  double rhs = 0.0;
};

struct CheckReport {
  bool holds = true;
  std::size_t grid_points = 0;
  std::size_t comparisons = 0;
  std::optional<CheckViolation> witness;
};

namespace detail {

inline std::size_t checked_grid_size(std::size_t grid_points, std::size_t n) {
  if (grid_points < 2) throw std::invalid_argument("grid needs at least two points per axis");
  std::size_t size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (size > 1000000 / grid_points) {
      throw std::invalid_argument("grid_points^n exceeds the exhaustive-check budget of 1e6");
    }
    size *= grid_points;
  }
  return size;
}

inline double grid_value(std::size_t k, std::size_t grid_points) {
  return static_cast<double>(k) / static_cast<double>(grid_points - 1);
}

/// Full value table over the grid, row-major with axis 0 slowest.
inline std::vector<double> value_table(const ValuationOracle& oracle, std::size_t grid_points,
                                       std::size_t table) {
  const std::size_t n = oracle.num_agents();
  std::vector<double> values(table);
  std::vector<std::size_t> digits(n, 0);
  std::vector<double> point(n, 0.0);
  for (std::size_t p = 0; p < table; ++p) {
    for (std::size_t d = 0; d < n; ++d) point[d] = grid_value(digits[d], grid_points);
    values[p] = oracle.value(SignalProfile(point));
    for (std::size_t d = n; d-- > 0;) {
      if (++digits[d] < grid_points) break;
      digits[d] = 0;
    }
  }
  return values;
}

inline SignalProfile profile_at(const std::vector<std::size_t>& digits, std::size_t grid_points) {
  std::vector<double> point(digits.size());
  for (std::size_t d = 0; d < digits.size(); ++d) point[d] = grid_value(digits[d], grid_points);
  return SignalProfile(std::move(point));
}

inline double comparison_slack(double a, double b, double c, double d) {
  const double mag = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
  return 1e-9 * (1.0 + mag);
}

}  // namespace detail

/// Checks the submodular-over-signals property (up to factor `d`) on a
/// uniform grid, exactly over every comparable pair: for each coordinate and
/// each pair of its values, the step marginal at any profile of the other
/// signals must be at most d times the marginal at every lower comparable
/// profile.  Running lattice minima of the marginals make the all-pairs
/// comparison linear in the grid per coordinate pair.
inline CheckReport check_sos(const ValuationOracle& oracle, std::size_t grid_points,
                             double d = 1.0) {
  if (!(d >= 1.0)) throw std::invalid_argument("approximation factor d must be at least 1");
  const std::size_t n = oracle.num_agents();
  const std::size_t table = detail::checked_grid_size(grid_points, n);
  const std::vector<double> values = detail::value_table(oracle, grid_points, table);

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t dim = n - 1; dim-- > 0;) stride[dim] = stride[dim + 1] * grid_points;

  // Rounding slack scales with the value magnitude the marginals came from.
  double value_scale = 0.0;
  for (double v : values) value_scale = std::max(value_scale, std::abs(v));
  const double slack = 1e-9 * (1.0 + 4.0 * value_scale);

  CheckReport report;
  report.grid_points = grid_points;

  std::vector<double> marginal(table, 0.0);
  std::vector<double> lattice_min(table, 0.0);
  const auto digit_of = [&](std::size_t p, std::size_t axis) {
    return (p / stride[axis]) % grid_points;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a + 1 < grid_points; ++a) {
      for (std::size_t b = a + 1; b < grid_points; ++b) {
        // Marginal of stepping coordinate i from a to b, on the slice with
        // digit i pinned to zero (one entry per profile of the others).
        for (std::size_t p = 0; p < table; ++p) {
          if (digit_of(p, i) != 0) continue;
          marginal[p] = values[p + b * stride[i]] - values[p + a * stride[i]];
        }
        // In-place prefix minimum along every other axis turns
        // lattice_min[t] into min over all s <= t of marginal[s].
        lattice_min = marginal;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == i) continue;
          for (std::size_t p = 0; p < table; ++p) {
            if (digit_of(p, i) != 0 || digit_of(p, r) == 0) continue;
            lattice_min[p] = std::min(lattice_min[p], lattice_min[p - stride[r]]);
          }
        }
        for (std::size_t p = 0; p < table; ++p) {
          if (digit_of(p, i) != 0) continue;
          ++report.comparisons;
          if (d * lattice_min[p] < marginal[p] - slack) {
            // Locate one dominated lower profile for the witness.
            for (std::size_t q = 0; q < table; ++q) {
              if (digit_of(q, i) != 0) continue;
              bool leq = true;
              for (std::size_t axis = 0; axis < n && leq; ++axis) {
                leq = digit_of(q, axis) <= digit_of(p, axis);
              }
              if (!leq || d * marginal[q] >= marginal[p] - slack) continue;
              std::vector<std::size_t> base(n), cmp(n);
              for (std::size_t axis = 0; axis < n; ++axis) {
                base[axis] = digit_of(q, axis);
                cmp[axis] = digit_of(p, axis);
              }
              base[i] = a;
              cmp[i] = a;
              report.holds = false;
              report.witness = CheckViolation{
                  i,
                  std::nullopt,
                  detail::profile_at(base, grid_points),
                  detail::profile_at(cmp, grid_points),
                  detail::grid_value(b, grid_points) - detail::grid_value(a, grid_points),
                  d * marginal[q],
                  marginal[p]};
              return report;
            }
          }
        }
      }
    }
  }
  return report;
}

/// Checks the single-crossing property on a uniform grid: raising agent i's
/// own signal must move agent i's value at least as much as any other
/// agent's value.
inline CheckReport check_single_crossing(const std::vector<ValuationOracle>& oracles,
                                         std::size_t grid_points) {
  if (oracles.empty()) throw std::invalid_argument("single-crossing check needs oracles");
  const std::size_t n = oracles.front().num_agents();
  if (oracles.size() != n) throw std::invalid_argument("need exactly one oracle per agent");
  const std::size_t table = detail::checked_grid_size(grid_points, n);

  std::vector<std::vector<double>> values;
  values.reserve(n);
  for (const auto& oracle : oracles) {
    values.push_back(detail::value_table(oracle, grid_points, table));
  }

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t dim = n - 1; dim-- > 0;) stride[dim] = stride[dim + 1] * grid_points;

  CheckReport report;
  report.grid_points = grid_points;

  std::vector<std::size_t> digits(n, 0);
  for (std::size_t p = 0; p < table; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      if (digits[i] != 0) continue;
      for (std::size_t a = 0; a + 1 < grid_points; ++a) {
        for (std::size_t b = a + 1; b < grid_points; ++b) {
          const double own_hi = values[i][p + b * stride[i]];
          const double own_lo = values[i][p + a * stride[i]];
          for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double oth_hi = values[j][p + b * stride[i]];
            const double oth_lo = values[j][p + a * stride[i]];
            ++report.comparisons;
            const double lhs = own_hi - own_lo;
            const double rhs = oth_hi - oth_lo;
            if (lhs < rhs - detail::comparison_slack(own_hi, own_lo, oth_hi, oth_lo)) {
              auto base = digits;
              base[i] = a;
              report.holds = false;
              report.witness = CheckViolation{
                  i,
                  j,
                  detail::profile_at(base, grid_points),
                  detail::profile_at(base, grid_points),
                  detail::grid_value(b, grid_points) - detail::grid_value(a, grid_points),
                  lhs,
                  rhs};
              return report;
            }
          }
        }
      }
    }
    for (std::size_t dim = n; dim-- > 0;) {
      if (++digits[dim] < grid_points) break;
      digits[dim] = 0;
    }
  }
  return report;
}

//------------------------------------------------------------------------------
// fixtures
//------------------------------------------------------------------------------

struct FixtureParams {
  std::size_t n = 2;
  std::size_t k = 1;
  double alpha = 100.0;
  double eps = kDefaultEps;
};

/// Two agents with the common-value product valuation, both signals high.
inline Instance alice_bob_fixture(double eps = kDefaultEps) {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::product(eps), 0, 2);
  oracles.emplace_back(FamilySpec::product(eps), 1, 2);
  return Instance(std::move(oracles), SignalProfile({1.0, 1.0}));
}

/// Same seller-side view after agent 1 swaps to a private valuation and a
/// low signal; the profitable-manipulation scenario for naive pricing.
inline Instance alice_bob_deviation_fixture(double eps = kDefaultEps) {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::product(eps), 0, 2);
  oracles.emplace_back(FamilySpec::affine_own(1.0, 0.5), 1, 2);
  return Instance(std::move(oracles), SignalProfile({1.0, 0.0}));
}

/// Agent 0 has a private value 1 + s_0; agent 1's value is alpha * s_0 plus
/// a vanishing own-signal term.  Payments must not be ruled out by the
/// asymmetric information.
inline Instance carl_daphne_fixture(double alpha = 100.0, double eps = kDefaultEps) {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::affine_own(1.0, 1.0), 0, 2);
  oracles.emplace_back(FamilySpec::weighted_sum({alpha, eps}), 1, 2);
  return Instance(std::move(oracles), SignalProfile({1.0, 1.0}));
}

/// All agents share the product valuation and all signals are high.
inline Instance sc_case1_fixture(std::size_t n, double eps = kDefaultEps) {
  if (n < 2) throw std::invalid_argument("fixture needs n >= 2");
  std::vector<ValuationOracle> oracles;
  for (AgentIndex i = 0; i < n; ++i) oracles.emplace_back(FamilySpec::product(eps), i, n);
  return Instance(std::move(oracles), SignalProfile(std::vector<double>(n, 1.0)));
}

/// Agent 0 swaps to a private value 0.5 + s_0 with a zero signal; by the
/// value-monotonicity characterisation its allocation must not exceed the
/// one from sc_case1.
inline Instance sc_case2_fixture(std::size_t n, double eps = kDefaultEps) {
  if (n < 2) throw std::invalid_argument("fixture needs n >= 2");
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::affine_own(1.0, 0.5), 0, n);
  for (AgentIndex i = 1; i < n; ++i) oracles.emplace_back(FamilySpec::product(eps), i, n);
  std::vector<double> s(n, 1.0);
  s[0] = 0.0;
  return Instance(std::move(oracles), SignalProfile(std::move(s)));
}

/// k+1 agents value the product of each other's signals (dependency sets of
/// size k); the rest are near-zero private values.  Realises the tight
/// welfare ratio for the bounded-dependency mechanism.
inline Instance kdep_lb1_fixture(std::size_t n, std::size_t k, double eps = kDefaultEps) {
  if (k < 1 || n < k + 1) throw std::invalid_argument("fixture needs 1 <= k and n >= k+1");
  std::vector<ValuationOracle> oracles;
  for (AgentIndex i = 0; i < n; ++i) {
    if (i <= k) {
      std::vector<AgentIndex> over;
      for (AgentIndex j = 0; j <= k; ++j) {
        if (j != i) over.push_back(j);
      }
      oracles.emplace_back(FamilySpec::product(eps, std::move(over)), i, n);
    } else {
      oracles.emplace_back(FamilySpec::affine_own(eps, 0.0), i, n);
    }
  }
  std::vector<double> s(n, 1.0);
  s[0] = 0.0;
  return Instance(std::move(oracles), SignalProfile(std::move(s)));
}

/// Variant with one private-value agent among the product block; the
/// index-scaled epsilon keeps low-side values distinct.
inline Instance kdep_lb2_fixture(std::size_t n, std::size_t k, double eps = kDefaultEps) {
  if (k < 1 || n < k + 1) throw std::invalid_argument("fixture needs 1 <= k and n >= k+1");
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::affine_own(1.0, 0.5), 0, n);
  for (AgentIndex i = 1; i < n; ++i) {
    if (i <= k) {
      std::vector<AgentIndex> over;
      for (AgentIndex j = 0; j <= k; ++j) over.push_back(j);
      oracles.emplace_back(FamilySpec::product(eps * static_cast<double>(i + 1), std::move(over)),
                           i, n);
    } else {
      oracles.emplace_back(FamilySpec::affine_own(eps, 0.0), i, n);
    }
  }
  std::vector<double> s(n, 1.0);
  s[0] = 0.0;
  return Instance(std::move(oracles), SignalProfile(std::move(s)));
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "alice_bob", "alice_bob_deviation", "carl_daphne", "sc_case1",
      "sc_case2",  "kdep_lb1",            "kdep_lb2"};
  return names;
}

inline Instance fixture(const std::string& name, const FixtureParams& p = {}) {
  if (name == "alice_bob") return alice_bob_fixture(p.eps);
  if (name == "alice_bob_deviation") return alice_bob_deviation_fixture(p.eps);
  if (name == "carl_daphne") return carl_daphne_fixture(p.alpha, p.eps);
  if (name == "sc_case1") return sc_case1_fixture(p.n, p.eps);
  if (name == "sc_case2") return sc_case2_fixture(p.n, p.eps);
  if (name == "kdep_lb1") return kdep_lb1_fixture(p.n, p.k, p.eps);
  if (name == "kdep_lb2") return kdep_lb2_fixture(p.n, p.k, p.eps);
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace idva
