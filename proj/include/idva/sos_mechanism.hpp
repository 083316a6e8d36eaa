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
//  Ex-post incentive-compatible single-item mechanism for valuations that are
//  submodular over signals (up to a factor d).  Agent i's allocation depends
//  on its reports only through the value v_i(s), via a monotone step function
//  whose breakpoints are competitor cutoffs; payments are the exact
//  area-under-the-curve prices for that step function.
//
//  Base-2 logarithms drive the thresholds and the colour budget chi; the
//  natural logarithm drives the 1/(ln n + 1) allocation factor.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/step_function.hpp>

#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace idva::sos {

struct Config {
  /// Submodularity slack: valuations are assumed d-submodular over signals.
  double d = 1.0;
  /// Colour budget override for infeasibility probes; default 2*d*log2(n)+1.
  std::optional<double> chi_override;

  void validate() const {
    if (!(std::isfinite(d) && d >= 1.0)) throw std::invalid_argument("d must be at least 1");
    if (chi_override && !(std::isfinite(*chi_override) && *chi_override >= 1.0)) {
      throw std::invalid_argument("chi override must be at least 1");
    }
  }

  double chi_for(std::size_t n) const {
    if (chi_override) return *chi_override;
    return 2.0 * d * std::log2(static_cast<double>(n)) + 1.0;
  }
};

/// 1 - 1/log2(n); nonpositive for n <= 2, where the low-side condition on
/// competitors degenerates to nonnegativity.
inline double threshold_factor(std::size_t n) {
  return 1.0 - 1.0 / std::log2(static_cast<double>(n));
}

/// Common prefactor (1/chi) * (1/(ln n + 1)) of every allocation level.
inline double level_base(std::size_t n, const Config& config = {}) {
  return (1.0 / config.chi_for(n)) * (1.0 / (std::log(static_cast<double>(n)) + 1.0));
}

/// Value cutoffs against every competitor: agent j supports any reported
/// value w with w <= cutoff[j], where
///   cutoff[j] = min(v_j(1_i, s_-i), v_j(0_i, s_-i) / (1 - 1/log2 n))
/// and the second term is treated as +infinity when the factor is
/// nonpositive.  cutoff[i] is NaN.
inline std::vector<double> competitor_cutoffs(const Instance& instance, AgentIndex i,
                                              QueryLedger* ledger = nullptr) {
  const std::size_t n = instance.n();
  if (i >= n) throw std::out_of_range("agent index out of range");
  std::vector<double> cutoffs(n, std::numeric_limits<double>::quiet_NaN());
  if (n == 1) return cutoffs;
  const double factor = threshold_factor(n);
  const SignalProfile raised = substitute(instance.signals, i, 1.0);
  const SignalProfile zeroed = substitute(instance.signals, i, 0.0);
  for (AgentIndex j = 0; j < n; ++j) {
    if (j == i) continue;
    const double hi = evaluate(instance.oracles[j], raised, ledger);
    const double lo = evaluate(instance.oracles[j], zeroed, ledger);
    cutoffs[j] = factor > 0.0 ? std::min(hi, lo / factor) : hi;
  }
  return cutoffs;
}

struct DSet {
  std::vector<AgentIndex> members;  ///< j != i with value <= cutoffs[j], sorted
  std::vector<double> cutoffs;      ///< size n, NaN at the owner's slot
};

/// Competitors that would still clear agent i's reported value after the
/// signal substitution probes.
inline DSet compute_d_set(const Instance& instance, AgentIndex i, double value,
                          QueryLedger* ledger = nullptr) {
  DSet result;
  result.cutoffs = competitor_cutoffs(instance, i, ledger);
  for (AgentIndex j = 0; j < instance.n(); ++j) {
    if (j != i && value <= result.cutoffs[j]) result.members.push_back(j);
  }
  return result;
}

namespace detail {

/// Monotone allocation curve from a cutoff multiset: at reported value w the
/// level is base / (#{cutoffs >= w} + 1).
inline StepFunction step_from_cutoffs(std::vector<double> cutoffs, double base) {
  std::sort(cutoffs.begin(), cutoffs.end());
  std::vector<double> breakpoints = cutoffs;
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  std::vector<double> levels(breakpoints.size() + 1);
  for (std::size_t idx = 0; idx < breakpoints.size(); ++idx) {
    const auto at_least = cutoffs.end() - std::lower_bound(cutoffs.begin(), cutoffs.end(),
                                                           breakpoints[idx]);
    levels[idx] = base / static_cast<double>(at_least + 1);
  }
  levels.back() = base;
  return StepFunction(std::move(breakpoints), std::move(levels));
}

inline std::vector<double> present_cutoffs(const std::vector<double>& cutoffs, AgentIndex i) {
  std::vector<double> present;
  present.reserve(cutoffs.size() > 0 ? cutoffs.size() - 1 : 0);
  for (AgentIndex j = 0; j < cutoffs.size(); ++j) {
    if (j != i) present.push_back(cutoffs[j]);
  }
  return present;
}

}  // namespace detail

/// Agent i's full allocation curve as a function of its reported value.  It
/// depends on the other agents' reports only, so evaluating it at v_i(s)
/// reproduces allocate() bitwise.
inline StepFunction allocation_step_function(const Instance& instance, AgentIndex i,
                                             const Config& config = {},
                                             QueryLedger* ledger = nullptr) {
  config.validate();
  const std::vector<double> cutoffs = competitor_cutoffs(instance, i, ledger);
  return detail::step_from_cutoffs(detail::present_cutoffs(cutoffs, i),
                                   level_base(instance.n(), config));
}

inline double allocate(const Instance& instance, AgentIndex i, const Config& config = {},
                       QueryLedger* ledger = nullptr) {
  const StepFunction curve = allocation_step_function(instance, i, config, ledger);
  return curve(evaluate(instance.oracles[i], instance.signals, ledger));
}

/// Area-under-the-curve price: x_i * v_i(s) - integral of the allocation
/// curve from 0 to v_i(s), computed by exact interval summation.
inline double payment(const Instance& instance, AgentIndex i, const Config& config = {},
                      QueryLedger* ledger = nullptr) {
  const StepFunction curve = allocation_step_function(instance, i, config, ledger);
  const double w = evaluate(instance.oracles[i], instance.signals, ledger);
  return curve(w) * w - curve.integrate(0.0, w);
}

//------------------------------------------------------------------------------
// welfare certificate
//------------------------------------------------------------------------------

/// Per-run witness that the expected welfare is within the proven factor of
/// the full-information optimum: y is a pointwise lower bound on the
/// allocation whose value sum already clears `lower_bound`.
struct WelfareCertificate {
  std::size_t k_star = 0;
  double t_kstar = 0.0;               ///< threshold at level k_star
  std::vector<double> y;              ///< per-agent allocation lower bounds
  double lower_bound = 0.0;           ///< proven welfare lower bound (absolute)
  double opt = 0.0;                   ///< max_i v_i(s)
  std::vector<std::size_t> level_counts;  ///< N_k for k = 0..floor(log2 n)+1
};

namespace detail {

constexpr std::size_t kLevelInfinite = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kLevelScanCap = 8000;

/// Smallest ell with value >= opt * factor^ell; kLevelInfinite if none
/// exists within the scan cap (value == 0, or tiny against a slow factor).
inline std::size_t value_level(double value, double opt, double factor) {
  for (std::size_t ell = 0; ell <= kLevelScanCap; ++ell) {
    if (value >= opt * std::pow(factor, static_cast<double>(ell))) return ell;
  }
  return kLevelInfinite;
}

}  // namespace detail

inline WelfareCertificate welfare_certificate(const Instance& instance, const Config& config = {},
                                              QueryLedger* ledger = nullptr) {
  config.validate();
  const std::size_t n = instance.n();
  if (n < 2) throw std::invalid_argument("welfare certificate needs n >= 2");

  const double chi = config.chi_for(n);
  const double base = level_base(n, config);
  const double factor = threshold_factor(n);

  std::vector<double> value(n);
  for (AgentIndex i = 0; i < n; ++i) {
    value[i] = evaluate(instance.oracles[i], instance.signals, ledger);
  }
  const double opt = *std::max_element(value.begin(), value.end());

  WelfareCertificate cert;
  cert.opt = opt;

  std::vector<std::size_t> level(n);
  for (AgentIndex i = 0; i < n; ++i) {
    level[i] = opt > 0.0 ? detail::value_level(value[i], opt, factor) : detail::kLevelInfinite;
  }

  // Level histogram and the first level whose successor stops doubling.
  const std::size_t cap = static_cast<std::size_t>(std::bit_width(n) - 1);  // floor(log2 n)
  cert.level_counts.assign(cap + 2, 0);
  for (AgentIndex i = 0; i < n; ++i) {
    if (level[i] < cert.level_counts.size()) ++cert.level_counts[level[i]];
  }
  if (opt > 0.0) {
    std::size_t below = cert.level_counts[0];
    std::size_t k = 0;
    while (k + 1 < cert.level_counts.size() && cert.level_counts[k + 1] >= below) {
      below += cert.level_counts[k + 1];
      ++k;
    }
    if (k > cap) throw std::logic_error("level histogram stopped doubling too late");
    cert.k_star = k;
    cert.t_kstar = opt * std::pow(factor, static_cast<double>(k));
    cert.lower_bound =
        std::pow(factor, static_cast<double>(k)) * opt /
        (2.0 * chi * (std::log(static_cast<double>(n)) + 1.0));
  }

  // Pointwise allocation lower bounds from the per-level eligible sets.
  cert.y.assign(n, 0.0);
  for (AgentIndex i = 0; i < n; ++i) {
    const double t_here =
        level[i] == detail::kLevelInfinite
            ? 0.0
            : opt * std::pow(factor, static_cast<double>(level[i]));
    const double t_next =
        level[i] == detail::kLevelInfinite
            ? 0.0
            : opt * std::pow(factor, static_cast<double>(level[i] + 1));
    const SignalProfile raised = substitute(instance.signals, i, 1.0);
    const SignalProfile zeroed = substitute(instance.signals, i, 0.0);
    std::size_t eligible = 0;
    for (AgentIndex j = 0; j < n; ++j) {
      if (j == i) continue;
      const double hi = evaluate(instance.oracles[j], raised, ledger);
      const double lo = evaluate(instance.oracles[j], zeroed, ledger);
      if (hi >= t_here && lo >= t_next) ++eligible;
    }
    cert.y[i] = base / static_cast<double>(eligible + 1);
  }
  return cert;
}

//------------------------------------------------------------------------------
// full run
//------------------------------------------------------------------------------

inline MechanismOutcome run(const Instance& instance, const Config& config = {}) {
  config.validate();
  const std::size_t n = instance.n();
  QueryLedger ledger(n);

  std::vector<double> value(n);
  for (AgentIndex i = 0; i < n; ++i) {
    value[i] = evaluate(instance.oracles[i], instance.signals, &ledger);
  }

  const double base = level_base(n, config);
  std::vector<double> x(n), p(n);
  std::vector<std::size_t> d_sizes(n, 0);
  for (AgentIndex i = 0; i < n; ++i) {
    const std::vector<double> cutoffs = competitor_cutoffs(instance, i, &ledger);
    const StepFunction curve = detail::step_from_cutoffs(detail::present_cutoffs(cutoffs, i), base);
    x[i] = curve(value[i]);
    p[i] = x[i] * value[i] - curve.integrate(0.0, value[i]);
    for (AgentIndex j = 0; j < n; ++j) {
      if (j != i && value[i] <= cutoffs[j]) ++d_sizes[i];
    }
  }

  MechanismOutcome outcome;
  outcome.allocation = std::move(x);
  outcome.payments = std::move(p);
  outcome.diagnostics = Json{{"mechanism", "sos"},
                             {"chi", config.chi_for(n)},
                             {"d", config.d},
                             {"d_set_sizes", d_sizes}};
  if (n >= 2) {
    const WelfareCertificate cert = welfare_certificate(instance, config, &ledger);
    outcome.diagnostics["certificate"] = Json{{"k_star", cert.k_star},
                                              {"t_kstar", cert.t_kstar},
                                              {"opt", cert.opt},
                                              {"lower_bound", cert.lower_bound},
                                              {"y", cert.y},
                                              {"level_counts", cert.level_counts}};
  }
  outcome.ledger = std::move(ledger);
  return outcome;
}

}  // namespace idva::sos
