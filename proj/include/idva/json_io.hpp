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
//  JSON serialisation of instances and outcomes.  Field order is canonical
//  (insertion order is preserved) so serialised files diff cleanly; doubles
//  round-trip bitwise through the shortest-representation printer.
//
//------------------------------------------------------------------------------

#include <idva/core.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace idva {

namespace detail {

inline Json transform_to_json(const ValuationOracle& oracle) {
  Json t;
  t["scale"] = oracle.scale();
  t["shift"] = oracle.shift();
  if (const auto& warp = oracle.warp()) {
    t["warp"] = Json{{"knot_in", warp->knot_in}, {"knot_out", warp->knot_out}};
  }
  return t;
}

inline bool transform_is_identity(const ValuationOracle& oracle) {
  return oracle.scale() == 1.0 && oracle.shift() == 0.0 && !oracle.warp();
}

}  // namespace detail

inline Json family_params_to_json(const FamilySpec& family) {
  Json params;
  if (const auto* f = std::get_if<WeightedSum>(&family.data())) {
    params["weights"] = f->weights;
  } else if (const auto* f = std::get_if<MineralRightsAverage>(&family.data())) {
    params["epsilon"] = f->epsilon;
  } else if (const auto* f = std::get_if<MaxOfSignals>(&family.data())) {
    params["epsilon"] = f->epsilon;
  } else if (const auto* f = std::get_if<ConcaveOfSum>(&family.data())) {
    params["weights"] = f->weights;
    params["gamma"] = f->gamma;
  } else if (const auto* f = std::get_if<Product>(&family.data())) {
    params["epsilon"] = f->epsilon;
    if (f->over) params["over"] = *f->over;
  } else if (const auto* f = std::get_if<AffineOwn>(&family.data())) {
    params["slope"] = f->slope;
    params["intercept"] = f->intercept;
  } else if (const auto* f = std::get_if<CustomTable>(&family.data())) {
    params["points_per_axis"] = f->points_per_axis;
    params["values"] = f->values;
  } else if (const auto* f = std::get_if<LiftedProduct>(&family.data())) {
    params["own_offset"] = f->own_offset;
    params["others_offset"] = f->others_offset;
  } else {
    throw std::logic_error("unserialisable family kind: " + family.kind());
  }
  return params;
}

inline FamilySpec family_from_json(const std::string& kind, const Json& params) {
  if (kind == "weighted_sum") {
    return FamilySpec::weighted_sum(params.at("weights").get<std::vector<double>>());
  }
  if (kind == "mineral_rights_average") {
    return FamilySpec::mineral_rights_average(params.at("epsilon").get<double>());
  }
  if (kind == "max_of_signals") {
    return FamilySpec::max_of_signals(params.at("epsilon").get<double>());
  }
  if (kind == "concave_of_sum") {
    return FamilySpec::concave_of_sum(params.at("weights").get<std::vector<double>>(),
                                      params.at("gamma").get<double>());
  }
  if (kind == "product") {
    std::optional<std::vector<AgentIndex>> over;
    if (params.contains("over")) over = params.at("over").get<std::vector<AgentIndex>>();
    return FamilySpec::product(params.at("epsilon").get<double>(), std::move(over));
  }
  if (kind == "affine_own") {
    return FamilySpec::affine_own(params.at("slope").get<double>(),
                                  params.at("intercept").get<double>());
  }
  if (kind == "custom_table") {
    return FamilySpec::custom_table(params.at("points_per_axis").get<std::size_t>(),
                                    params.at("values").get<std::vector<double>>());
  }
  if (kind == "lifted_product") {
    return FamilySpec::lifted_product(params.at("own_offset").get<double>(),
                                      params.at("others_offset").get<double>());
  }
  throw std::invalid_argument(
      "unknown valuation family \"" + kind +
      "\"; known: weighted_sum, mineral_rights_average, max_of_signals, concave_of_sum, "
      "product, affine_own, custom_table, lifted_product");
}

inline Json instance_to_json(const Instance& instance) {
  Json doc;
  doc["n"] = instance.n();
  Json agents = Json::array();
  for (AgentIndex i = 0; i < instance.n(); ++i) {
    const ValuationOracle& oracle = instance.oracles[i];
    Json agent;
    agent["family"] = oracle.family().kind();
    agent["params"] = family_params_to_json(oracle.family());
    if (oracle.declared_deps()) {
      agent["deps"] = *oracle.declared_deps();
    } else {
      agent["deps"] = nullptr;
    }
    if (!detail::transform_is_identity(oracle)) {
      agent["transform"] = detail::transform_to_json(oracle);
    }
    agents.push_back(std::move(agent));
  }
  doc["agents"] = std::move(agents);
  doc["signals"] = instance.signals.values();
  return doc;
}

inline Instance instance_from_json(const Json& doc) {
  const auto n = doc.at("n").get<std::size_t>();
  const Json& agents = doc.at("agents");
  if (!agents.is_array() || agents.size() != n) {
    throw std::invalid_argument("agents array must have exactly n entries");
  }
  std::vector<ValuationOracle> oracles;
  oracles.reserve(n);
  for (AgentIndex i = 0; i < n; ++i) {
    const Json& agent = agents.at(i);
    FamilySpec family =
        family_from_json(agent.at("family").get<std::string>(), agent.at("params"));
    std::optional<std::vector<AgentIndex>> deps;
    if (agent.contains("deps") && !agent.at("deps").is_null()) {
      deps = agent.at("deps").get<std::vector<AgentIndex>>();
    }
    ValuationOracle oracle(std::move(family), i, n, std::move(deps));
    if (agent.contains("transform")) {
      const Json& t = agent.at("transform");
      if (t.contains("scale")) oracle = oracle.scaled(t.at("scale").get<double>());
      if (t.contains("shift")) oracle = oracle.shifted(t.at("shift").get<double>());
      if (t.contains("warp")) {
        oracle = oracle.warped(SignalWarp(t.at("warp").at("knot_in").get<double>(),
                                          t.at("warp").at("knot_out").get<double>()));
      }
    }
    oracles.push_back(std::move(oracle));
  }
  return Instance(std::move(oracles), SignalProfile(doc.at("signals").get<std::vector<double>>()));
}

inline Json outcome_to_json(const MechanismOutcome& outcome) {
  Json doc;
  doc["allocation"] = outcome.allocation;
  doc["payments"] = outcome.payments;
  doc["query_counts"] = outcome.ledger.counts();
  doc["diagnostics"] = outcome.diagnostics;
  return doc;
}

inline void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return Json::parse(in);
}

}  // namespace idva
