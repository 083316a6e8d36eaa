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
//  Black-box verification battery for mechanisms: ex-post incentive
//  compatibility under joint signal/valuation deviations, individual
//  rationality at truth, the value-only monotone-allocation
//  characterisation, welfare against the certified bound, and query audits.
//  Deliberately broken mechanism variants document what each test catches.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/graphs.hpp>
#include <idva/kdep_mechanism.hpp>
#include <idva/sos_mechanism.hpp>
#include <idva/valuations.hpp>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace idva::verify {

enum class Mechanism { sos, kdep };

inline std::string to_string(Mechanism m) { return m == Mechanism::sos ? "sos" : "kdep"; }

using MechanismFn = std::function<MechanismOutcome(const Instance&)>;

inline MechanismFn mechanism_fn(Mechanism m, sos::Config config = {}) {
  if (m == Mechanism::sos) {
    return [config](const Instance& instance) { return sos::run(instance, config); };
  }
  return [](const Instance& instance) { return kdep::run(instance); };
}

//------------------------------------------------------------------------------
// deviation transforms
//------------------------------------------------------------------------------

/// One way an agent can misreport its valuation alongside a signal lie.
/// Every transform yields a valid oracle (or nothing, when the combination
/// is not representable), so deviations stay inside the report space.
struct Transform {
  enum class Kind {
    identity,     ///< signal lie only
    scale,        ///< a * v
    shift,        ///< v + b
    swap_affine,  ///< replace with affine_own(a, b)
    pin_exact,    ///< own-signal warp making v'(s_dev, s_-i) == v_i(s) bitwise
    pin_scale,    ///< multiplicative pin to v_i(s), exact up to rounding
  };

  Kind kind = Kind::identity;
  double a = 1.0;
  double b = 0.0;

  std::string name() const {
    switch (kind) {
      case Kind::identity: return "identity";
      case Kind::scale: return "scale(" + std::to_string(a) + ")";
      case Kind::shift: return "shift(" + std::to_string(b) + ")";
      case Kind::swap_affine:
        return "swap_affine(" + std::to_string(a) + "," + std::to_string(b) + ")";
      case Kind::pin_exact: return "pin_exact";
      case Kind::pin_scale: return "pin_scale";
    }
    return "unknown";
  }

  /// Deviating oracle for agent i reporting signal s_dev, or nothing when
  /// this transform cannot produce a valid oracle for that report.
  std::optional<ValuationOracle> apply(const Instance& instance, AgentIndex i,
                                       double s_dev) const {
    const ValuationOracle& truth = instance.oracles[i];
    switch (kind) {
      case Kind::identity:
        return truth;
      case Kind::scale:
        return truth.scaled(a);
      case Kind::shift:
        return truth.shifted(b);
      case Kind::swap_affine:
        return ValuationOracle(FamilySpec::affine_own(a, b), i, instance.n());
      case Kind::pin_exact: {
        const double s_true = instance.signals[i];
        if (!(s_true > 0.0 && s_true < 1.0 && s_dev > 0.0 && s_dev < 1.0)) return std::nullopt;
        return truth.warped(SignalWarp(s_dev, s_true));
      }
      case Kind::pin_scale: {
        const double target = truth.value(instance.signals);
        const double at_dev = truth.value(substitute(instance.signals, i, s_dev));
        if (!(at_dev > 0.0) || !(target > 0.0)) return std::nullopt;
        return truth.scaled(target / at_dev);
      }
    }
    return std::nullopt;
  }
};

struct DeviationSpec {
  std::vector<double> signal_grid;
  std::vector<Transform> transforms;

  /// 11 signal points and six always-representable transforms, plus the two
  /// value pins when they apply.
  static DeviationSpec standard() {
    DeviationSpec spec;
    for (int k = 0; k <= 10; ++k) spec.signal_grid.push_back(static_cast<double>(k) / 10.0);
    spec.transforms = {
        {Transform::Kind::identity, 0.0, 0.0},
        {Transform::Kind::scale, 0.5, 0.0},
        {Transform::Kind::scale, 2.0, 0.0},
        {Transform::Kind::shift, 0.0, 0.25},
        {Transform::Kind::shift, 0.0, 1.0},
        {Transform::Kind::swap_affine, 1.0, 0.5},
        {Transform::Kind::pin_exact, 0.0, 0.0},
        {Transform::Kind::pin_scale, 0.0, 0.0},
    };
    return spec;
  }
};

//------------------------------------------------------------------------------
// reports
//------------------------------------------------------------------------------

struct Witness {
  AgentIndex agent = 0;
  std::string transform;
  double deviation_signal = 0.0;
  double truthful_utility = 0.0;
  double deviation_utility = 0.0;
  Json detail;
};

struct VerificationReport {
  bool passed = true;
  std::size_t checks = 0;
  std::size_t min_deviations_per_agent = 0;
  /// Largest utility gain any deviation achieved (EPIC) or most negative
  /// truthful utility (IR); what the tolerance is compared against.
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
};

//------------------------------------------------------------------------------
// ex-post incentive compatibility
//------------------------------------------------------------------------------

/// True utility of agent i under an outcome: value at the true profile
/// times allocation, minus payment.
inline double true_utility(const Instance& instance, AgentIndex i,
                           const MechanismOutcome& outcome) {
  return instance.oracles[i].value(instance.signals) * outcome.allocation[i] -
         outcome.payments[i];
}

/// Runs every (signal, transform) deviation for every agent and reports the
/// largest utility gain over truth-telling.  Passing means no deviation
/// gains more than `tol`.
inline VerificationReport test_epic(const Instance& instance, const MechanismFn& mechanism,
                                    const DeviationSpec& spec = DeviationSpec::standard(),
                                    double tol = 1e-9) {
  const std::size_t n = instance.n();
  const MechanismOutcome truthful = mechanism(instance);

  VerificationReport report;
  report.min_deviations_per_agent = std::numeric_limits<std::size_t>::max();

  for (AgentIndex i = 0; i < n; ++i) {
    const double u_truth = true_utility(instance, i, truthful);
    std::size_t applied = 0;
    for (double s_dev : spec.signal_grid) {
      for (const Transform& t : spec.transforms) {
        const auto deviating = t.apply(instance, i, s_dev);
        if (!deviating) continue;
        std::vector<ValuationOracle> oracles = instance.oracles;
        oracles[i] = *deviating;
        const Instance deviated(std::move(oracles), substitute(instance.signals, i, s_dev));
        const MechanismOutcome out = mechanism(deviated);
        const double u_dev = instance.oracles[i].value(instance.signals) * out.allocation[i] -
                             out.payments[i];
        ++applied;
        ++report.checks;
        const double gain = u_dev - u_truth;
        if (gain > report.worst) {
          report.worst = gain;
          if (gain > tol) {
            report.passed = false;
            report.witness = Witness{i,
                                     t.name(),
                                     s_dev,
                                     u_truth,
                                     u_dev,
                                     Json{{"agent", i},
                                          {"transform", t.name()},
                                          {"deviation_signal", s_dev},
                                          {"truthful_utility", u_truth},
                                          {"deviation_utility", u_dev},
                                          {"gain", gain}}};
          }
        }
      }
    }
    report.min_deviations_per_agent = std::min(report.min_deviations_per_agent, applied);
  }
  return report;
}

//------------------------------------------------------------------------------
// individual rationality at truth
//------------------------------------------------------------------------------

inline VerificationReport test_ir(const Instance& instance, const MechanismFn& mechanism,
                                  double tol = 1e-12) {
  const MechanismOutcome truthful = mechanism(instance);
  VerificationReport report;
  report.worst = std::numeric_limits<double>::infinity();
  for (AgentIndex i = 0; i < instance.n(); ++i) {
    const double u = true_utility(instance, i, truthful);
    ++report.checks;
    if (u < report.worst) {
      report.worst = u;
      if (u < -tol) {
        report.passed = false;
        report.witness = Witness{i, "truth", instance.signals[i], u, u,
                                 Json{{"agent", i}, {"truthful_utility", u}}};
      }
    }
  }
  return report;
}

//------------------------------------------------------------------------------
// value-only monotone characterisation
//------------------------------------------------------------------------------

/// Equal-value substitutions for agent i: five reports that change the
/// signal and the valuation family but evaluate to v_i(s) bitwise, so the
/// mechanism must reproduce (x_i, p_i) bitwise.
inline std::vector<std::pair<ValuationOracle, double>> equal_value_substitutions(
    const Instance& instance, AgentIndex i) {
  const double w = instance.oracles[i].value(instance.signals);
  const double s_true = instance.signals[i];
  const std::size_t n = instance.n();

  std::vector<std::pair<ValuationOracle, double>> subs;
  for (double slope : {1.0, 2.0, 0.5}) {
    subs.emplace_back(ValuationOracle(FamilySpec::affine_own(slope, w), i, n), 0.0);
  }
  if (s_true > 0.0 && s_true < 1.0) {
    for (double s_dev : {s_true / 2.0, (1.0 + s_true) / 2.0}) {
      if (s_dev > 0.0 && s_dev < 1.0 && s_dev != s_true) {
        subs.emplace_back(instance.oracles[i].warped(SignalWarp(s_dev, s_true)), s_dev);
      } else {
        subs.emplace_back(ValuationOracle(FamilySpec::affine_own(4.0, w), i, n), 0.0);
      }
    }
  } else {
    subs.emplace_back(ValuationOracle(FamilySpec::affine_own(4.0, w), i, n), 0.0);
    subs.emplace_back(ValuationOracle(FamilySpec::affine_own(0.25, w), i, n), 0.0);
  }
  return subs;
}

/// Checks that the mechanism treats reports with equal value identically
/// (bitwise) and allocates monotonically in the reported value.
inline VerificationReport test_characterization(const Instance& instance,
                                                const MechanismFn& mechanism,
                                                std::size_t sweep_points = 21) {
  const std::size_t n = instance.n();
  const MechanismOutcome truthful = mechanism(instance);
  VerificationReport report;
  report.worst = 0.0;

  for (AgentIndex i = 0; i < n; ++i) {
    for (const auto& [oracle, s_dev] : equal_value_substitutions(instance, i)) {
      std::vector<ValuationOracle> oracles = instance.oracles;
      oracles[i] = oracle;
      const Instance substituted(std::move(oracles), substitute(instance.signals, i, s_dev));
      const MechanismOutcome out = mechanism(substituted);
      ++report.checks;
      if (out.allocation[i] != truthful.allocation[i] ||
          out.payments[i] != truthful.payments[i]) {
        report.passed = false;
        report.witness =
            Witness{i, "equal_value_substitution", s_dev, truthful.allocation[i],
                    out.allocation[i],
                    Json{{"agent", i},
                         {"x_truth", truthful.allocation[i]},
                         {"x_substituted", out.allocation[i]},
                         {"p_truth", truthful.payments[i]},
                         {"p_substituted", out.payments[i]}}};
        return report;
      }
    }

    // Reported-value sweep: x_i must be non-decreasing in the value.
    const double w = instance.oracles[i].value(instance.signals);
    const double top = 2.0 * std::max(w, 1.0);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < sweep_points; ++step) {
      const double target =
          top * static_cast<double>(step) / static_cast<double>(sweep_points - 1);
      std::vector<ValuationOracle> oracles = instance.oracles;
      oracles[i] = ValuationOracle(FamilySpec::affine_own(1.0, target), i, n);
      const Instance swept(std::move(oracles), substitute(instance.signals, i, 0.0));
      const MechanismOutcome out = mechanism(swept);
      ++report.checks;
      if (out.allocation[i] < previous) {
        report.passed = false;
        report.witness = Witness{i, "value_sweep", 0.0, previous, out.allocation[i],
                                 Json{{"agent", i},
                                      {"reported_value", target},
                                      {"x_before", previous},
                                      {"x_at_value", out.allocation[i]}}};
        return report;
      }
      previous = out.allocation[i];
    }
  }
  return report;
}

//------------------------------------------------------------------------------
// welfare and query audits
//------------------------------------------------------------------------------

struct WelfareReport {
  double opt = 0.0;
  double expected_welfare = 0.0;
  double ratio = 1.0;
  double bound = 0.0;
  bool passed = true;
};

inline WelfareReport measure_welfare(const Instance& instance, Mechanism mechanism,
                                     sos::Config config = {}) {
  const MechanismOutcome out = mechanism_fn(mechanism, config)(instance);
  WelfareReport report;
  const std::size_t n = instance.n();
  for (AgentIndex i = 0; i < n; ++i) {
    const double v = instance.oracles[i].value(instance.signals);
    report.opt = std::max(report.opt, v);
    report.expected_welfare += out.allocation[i] * v;
  }
  if (n == 1) {
    report.ratio = 1.0;
    report.bound = 1.0;
    report.passed = true;
  } else if (report.opt > 0.0) {
    // Pass/fail compares on the welfare scale: dividing both sides by opt
    // rounds twice and can drop a tight ratio one ulp below a tight bound.
    report.ratio = report.expected_welfare / report.opt;
    if (mechanism == Mechanism::sos) {
      const double floor_welfare = sos::welfare_certificate(instance, config).lower_bound;
      report.bound = floor_welfare / report.opt;
      report.passed = report.expected_welfare >= floor_welfare;
    } else {
      const std::size_t k = kdep::build_dependency_graph(instance).k;
      report.bound = 1.0 / (2.0 * static_cast<double>(k + 1));
      report.passed = report.expected_welfare >= report.bound * report.opt;
    }
  } else {
    report.passed = true;
  }
  return report;
}

struct QueryAuditReport {
  std::vector<std::size_t> counts;
  std::size_t limit = 0;
  bool passed = true;
};

/// Distinct value queries per oracle across a full run, including payments
/// and certificates: at most 2n-1 for the submodular mechanism (the full
/// profile plus both substitution probes per other agent) and at most n for
/// the bounded-dependency mechanism.
inline QueryAuditReport audit_queries(const Instance& instance, Mechanism mechanism,
                                      sos::Config config = {}) {
  const MechanismOutcome out = mechanism_fn(mechanism, config)(instance);
  QueryAuditReport report;
  const std::size_t n = instance.n();
  report.limit = n == 1 ? 1 : (mechanism == Mechanism::sos ? 2 * n - 1 : n);
  report.counts = out.ledger.counts();
  for (std::size_t c : report.counts) {
    if (c > report.limit) report.passed = false;
  }
  return report;
}

//------------------------------------------------------------------------------
// deliberately broken variants
//------------------------------------------------------------------------------

/// Named defects that the battery must catch; each reuses the real
/// building blocks with one twist.
enum class Mutant {
  non_monotone_step,       ///< reversed cutoff membership: allocation falls in value
  payment_offset,          ///< every payment shifted by a constant
  d_set_uses_own_signal,   ///< competitor probes read the reported own signal
};

inline std::string to_string(Mutant m) {
  switch (m) {
    case Mutant::non_monotone_step: return "non_monotone_step";
    case Mutant::payment_offset: return "payment_offset";
    case Mutant::d_set_uses_own_signal: return "d_set_uses_own_signal";
  }
  return "unknown";
}

inline MechanismFn mutant_mechanism(Mutant mutant, sos::Config config = {}) {
  switch (mutant) {
    case Mutant::non_monotone_step:
      return [config](const Instance& instance) {
        const std::size_t n = instance.n();
        QueryLedger ledger(n);
        const double base = sos::level_base(n, config);
        std::vector<double> x(n), p(n);
        for (AgentIndex i = 0; i < n; ++i) {
          const double w = evaluate(instance.oracles[i], instance.signals, &ledger);
          std::vector<double> cutoffs = sos::competitor_cutoffs(instance, i, &ledger);
          cutoffs.erase(cutoffs.begin() + static_cast<std::ptrdiff_t>(i));
          std::sort(cutoffs.begin(), cutoffs.end());
          std::vector<double> breakpoints = cutoffs;
          breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                            breakpoints.end());
          // Membership reversed: competitors with cutoff *below* the report
          // count, so levels decrease in the reported value.
          std::vector<double> levels(breakpoints.size() + 1);
          levels[0] = base;
          for (std::size_t idx = 0; idx < breakpoints.size(); ++idx) {
            const auto below =
                std::upper_bound(cutoffs.begin(), cutoffs.end(), breakpoints[idx]) -
                cutoffs.begin();
            levels[idx + 1] = base / static_cast<double>(below + 1);
          }
          const StepFunction curve{std::move(breakpoints), std::move(levels)};
          x[i] = curve(w);
          p[i] = x[i] * w - curve.integrate(0.0, w);
        }
        MechanismOutcome outcome;
        outcome.allocation = std::move(x);
        outcome.payments = std::move(p);
        outcome.ledger = std::move(ledger);
        outcome.diagnostics = Json{{"mechanism", "mutant:non_monotone_step"}};
        return outcome;
      };
    case Mutant::payment_offset:
      return [config](const Instance& instance) {
        MechanismOutcome outcome = sos::run(instance, config);
        for (double& p : outcome.payments) p += 0.01;
        outcome.diagnostics["mechanism"] = "mutant:payment_offset";
        return outcome;
      };
    case Mutant::d_set_uses_own_signal:
      return [config](const Instance& instance) {
        const std::size_t n = instance.n();
        QueryLedger ledger(n);
        const double base = sos::level_base(n, config);
        const double factor = sos::threshold_factor(n);
        std::vector<double> x(n), p(n);
        for (AgentIndex i = 0; i < n; ++i) {
          const double w = evaluate(instance.oracles[i], instance.signals, &ledger);
          const SignalProfile zeroed = substitute(instance.signals, i, 0.0);
          // Defect: the high-side probe reads the reported own signal
          // instead of raising it to 1.
          std::vector<double> cutoffs;
          cutoffs.reserve(n > 0 ? n - 1 : 0);
          for (AgentIndex j = 0; j < n; ++j) {
            if (j == i) continue;
            const double hi = evaluate(instance.oracles[j], instance.signals, &ledger);
            const double lo = evaluate(instance.oracles[j], zeroed, &ledger);
            cutoffs.push_back(factor > 0.0 ? std::min(hi, lo / factor) : hi);
          }
          const StepFunction curve = sos::detail::step_from_cutoffs(std::move(cutoffs), base);
          x[i] = curve(w);
          p[i] = x[i] * w - curve.integrate(0.0, w);
        }
        MechanismOutcome outcome;
        outcome.allocation = std::move(x);
        outcome.payments = std::move(p);
        outcome.ledger = std::move(ledger);
        outcome.diagnostics = Json{{"mechanism", "mutant:d_set_uses_own_signal"}};
        return outcome;
      };
  }
  throw std::invalid_argument("unknown mutant");
}

}  // namespace idva::verify
