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
//  Randomised experiment harness: seeded instance generators per valuation
//  family, batch runs measuring welfare ratios and query counts, and
//  reproducible JSON/CSV reports.  Every random draw flows from one seed
//  through per-trial derived streams, so any row can be replayed alone.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>
#include <idva/rng.hpp>
#include <idva/verify.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace idva::experiment {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::vector<std::size_t> n_list = {2, 4, 8, 16};
  std::vector<std::string> families = {"weighted_sum", "mineral_rights_average",
                                       "max_of_signals", "concave_of_sum"};
  std::size_t trials = 10;
  std::string mechanism = "both";  ///< "sos", "kdep", or "both"
  sos::Config sos_config;
  std::size_t max_deps = 2;  ///< dependency cap for the sparse generators

  void validate() const {
    if (mechanism != "sos" && mechanism != "kdep" && mechanism != "both") {
      throw std::invalid_argument("mechanism must be sos, kdep, or both");
    }
    if (n_list.empty() || families.empty() || trials == 0) {
      throw std::invalid_argument("experiment needs at least one n, family, and trial");
    }
    for (std::size_t n : n_list) {
      if (n == 0) throw std::invalid_argument("n must be positive");
    }
    sos_config.validate();
  }
};

//------------------------------------------------------------------------------
// random instance generation
//------------------------------------------------------------------------------

namespace detail {

/// Signals stay interior so ratio denominators and product values never
/// collapse to zero.
inline double random_signal(SplitMix64& rng) { return 0.001 + 0.998 * rng.next_double(); }

inline std::vector<double> random_weights(std::size_t n, AgentIndex own, SplitMix64& rng) {
  std::vector<double> w(n);
  for (double& v : w) v = rng.next_double();
  w[own] = std::max(w[own], 0.1);
  return w;
}

/// Distinct indices drawn from {0..n-1} minus `own`, at most `count` of them.
inline std::vector<AgentIndex> random_others(std::size_t n, AgentIndex own, std::size_t count,
                                             SplitMix64& rng) {
  std::vector<AgentIndex> pool;
  pool.reserve(n - 1);
  for (AgentIndex j = 0; j < n; ++j) {
    if (j != own) pool.push_back(j);
  }
  for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
    std::swap(pool[i], pool[i + rng.next_index(pool.size() - i)]);
  }
  pool.resize(std::min(count, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// One random oracle of the named family.  "sparse_weighted_sum" and
/// "sparse_product" bound the dependency count by `max_deps`; the rest may
/// depend on every signal.
inline ValuationOracle random_oracle(const std::string& family, std::size_t n, AgentIndex own,
                                     SplitMix64& rng, std::size_t max_deps) {
  if (family == "weighted_sum") {
    return {FamilySpec::weighted_sum(detail::random_weights(n, own, rng)), own, n};
  }
  if (family == "mineral_rights_average") {
    return {FamilySpec::mineral_rights_average(0.5 * rng.next_double()), own, n};
  }
  if (family == "max_of_signals") {
    return {FamilySpec::max_of_signals(rng.next_in(0.01, 0.5)), own, n};
  }
  if (family == "concave_of_sum") {
    return {FamilySpec::concave_of_sum(detail::random_weights(n, own, rng),
                                       rng.next_in(0.3, 1.0)),
            own, n};
  }
  if (family == "lifted_product") {
    return {FamilySpec::lifted_product(rng.next_in(1.0, 2.0), rng.next_in(1.0, 2.0)), own, n};
  }
  if (family == "affine_own") {
    return {FamilySpec::affine_own(rng.next_in(0.1, 2.0), rng.next_double()), own, n};
  }
  if (family == "sparse_weighted_sum") {
    std::vector<double> w(n, 0.0);
    w[own] = rng.next_in(0.1, 1.0);
    for (AgentIndex j : detail::random_others(n, own, max_deps, rng)) {
      w[j] = rng.next_in(0.1, 1.0);
    }
    return {FamilySpec::weighted_sum(std::move(w)), own, n};
  }
  if (family == "sparse_product") {
    std::vector<AgentIndex> over = detail::random_others(n, own, max_deps, rng);
    over.push_back(own);
    std::sort(over.begin(), over.end());
    return {FamilySpec::product(rng.next_in(0.5, 1.5), std::move(over)), own, n};
  }
  throw std::invalid_argument(
      "unknown generator family \"" + family +
      "\"; known: weighted_sum, mineral_rights_average, max_of_signals, concave_of_sum, "
      "lifted_product, affine_own, sparse_weighted_sum, sparse_product");
}

inline Instance random_instance(const std::string& family, std::size_t n, SplitMix64& rng,
                                std::size_t max_deps = 2) {
  std::vector<ValuationOracle> oracles;
  oracles.reserve(n);
  for (AgentIndex i = 0; i < n; ++i) {
    oracles.push_back(random_oracle(family, n, i, rng, max_deps));
  }
  std::vector<double> signals(n);
  for (double& s : signals) s = detail::random_signal(rng);
  return Instance(std::move(oracles), SignalProfile(std::move(signals)));
}

//------------------------------------------------------------------------------
// lottery sampling
//------------------------------------------------------------------------------

/// Draws the winner of a fractional allocation; nullopt is the no-sale
/// residual 1 - sum(x).
inline std::optional<AgentIndex> sample_lottery(const std::vector<double>& allocation,
                                                SplitMix64& rng) {
  const double u = rng.next_double();
  double cumulative = 0.0;
  for (AgentIndex i = 0; i < allocation.size(); ++i) {
    cumulative += allocation[i];
    if (u < cumulative) return i;
  }
  return std::nullopt;
}

//------------------------------------------------------------------------------
// batch runs
//------------------------------------------------------------------------------

struct ExperimentRow {
  std::size_t n = 0;
  std::string family;
  std::size_t trial = 0;
  std::string mechanism;
  double opt = 0.0;
  double expected_welfare = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool ratio_ok = false;
  std::size_t max_queries = 0;
  std::size_t query_limit = 0;
  bool queries_ok = false;
  double sum_x = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  Json json;
  std::string csv;
  bool all_passed = true;
};

namespace detail {

inline ExperimentRow run_row(const Instance& instance, verify::Mechanism mechanism,
                             const sos::Config& config) {
  ExperimentRow row;
  row.mechanism = verify::to_string(mechanism);
  row.n = instance.n();
  const verify::WelfareReport welfare = verify::measure_welfare(instance, mechanism, config);
  row.opt = welfare.opt;
  row.expected_welfare = welfare.expected_welfare;
  row.ratio = welfare.ratio;
  row.bound = welfare.bound;
  row.ratio_ok = welfare.passed;
  const verify::QueryAuditReport queries = verify::audit_queries(instance, mechanism, config);
  row.max_queries = *std::max_element(queries.counts.begin(), queries.counts.end());
  row.query_limit = queries.limit;
  row.queries_ok = queries.passed;
  const MechanismOutcome out = verify::mechanism_fn(mechanism, config)(instance);
  row.sum_x = std::accumulate(out.allocation.begin(), out.allocation.end(), 0.0);
  return row;
}

/// Shortest round-trip decimal form, via the JSON printer.
inline std::string csv_double(double v) { return Json(v).dump(); }

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<verify::Mechanism> mechanisms;
  if (config.mechanism == "sos" || config.mechanism == "both") {
    mechanisms.push_back(verify::Mechanism::sos);
  }
  if (config.mechanism == "kdep" || config.mechanism == "both") {
    mechanisms.push_back(verify::Mechanism::kdep);
  }

  ExperimentReport report;
  std::ostringstream csv;
  csv << "n,family,trial,mechanism,opt,expected_welfare,ratio,bound,"
         "max_queries_per_agent,sum_x\n";

  for (std::size_t n : config.n_list) {
    for (std::size_t family_idx = 0; family_idx < config.families.size(); ++family_idx) {
      const std::string& family = config.families[family_idx];
      for (std::size_t trial = 0; trial < config.trials; ++trial) {
        SplitMix64 rng =
            derive_stream(config.seed, {n, family_idx, trial});
        const Instance instance = random_instance(family, n, rng, config.max_deps);
        for (verify::Mechanism mechanism : mechanisms) {
          ExperimentRow row = detail::run_row(instance, mechanism, config.sos_config);
          row.family = family;
          row.trial = trial;
          report.all_passed = report.all_passed && row.ratio_ok && row.queries_ok;
          csv << row.n << ',' << row.family << ',' << row.trial << ',' << row.mechanism << ','
              << detail::csv_double(row.opt) << ',' << detail::csv_double(row.expected_welfare)
              << ',' << detail::csv_double(row.ratio) << ',' << detail::csv_double(row.bound)
              << ',' << row.max_queries << ',' << detail::csv_double(row.sum_x) << '\n';
          report.rows.push_back(std::move(row));
        }
      }
    }
  }

  Json aggregates = Json::object();
  for (verify::Mechanism mechanism : mechanisms) {
    const std::string name = verify::to_string(mechanism);
    double min_ratio = std::numeric_limits<double>::infinity();
    double sum_ratio = 0.0;
    std::size_t count = 0;
    std::size_t ratio_failures = 0;
    std::size_t query_failures = 0;
    for (const ExperimentRow& row : report.rows) {
      if (row.mechanism != name) continue;
      ++count;
      min_ratio = std::min(min_ratio, row.ratio);
      sum_ratio += row.ratio;
      if (!row.ratio_ok) ++ratio_failures;
      if (!row.queries_ok) ++query_failures;
    }
    aggregates[name] = Json{{"rows", count},
                            {"min_ratio", min_ratio},
                            {"mean_ratio", count > 0 ? sum_ratio / static_cast<double>(count)
                                                     : 0.0},
                            {"ratio_failures", ratio_failures},
                            {"query_failures", query_failures}};
  }

  Json rows_json = Json::array();
  for (const ExperimentRow& row : report.rows) {
    rows_json.push_back(Json{{"n", row.n},
                             {"family", row.family},
                             {"trial", row.trial},
                             {"mechanism", row.mechanism},
                             {"opt", row.opt},
                             {"expected_welfare", row.expected_welfare},
                             {"ratio", row.ratio},
                             {"bound", row.bound},
                             {"ratio_ok", row.ratio_ok},
                             {"max_queries_per_agent", row.max_queries},
                             {"query_limit", row.query_limit},
                             {"queries_ok", row.queries_ok},
                             {"sum_x", row.sum_x}});
  }

  report.json = Json{{"rng", "splitmix64"},
                     {"seed", config.seed},
                     {"config", Json{{"n_list", config.n_list},
                                     {"families", config.families},
                                     {"trials", config.trials},
                                     {"mechanism", config.mechanism},
                                     {"max_deps", config.max_deps},
                                     {"chi", config.sos_config.chi_override
                                                 ? Json(*config.sos_config.chi_override)
                                                 : Json(nullptr)},
                                     {"d", config.sos_config.d}}},
                     {"aggregates", std::move(aggregates)},
                     {"rows", std::move(rows_json)},
                     {"all_passed", report.all_passed}};
  report.csv = csv.str();
  return report;
}

}  // namespace idva::experiment
