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
//  Minimal end-to-end walkthrough: build a three-agent instance, run both
//  mechanisms, inspect the feasibility graph, and sample the lottery.
//
//------------------------------------------------------------------------------

#include <idva/idva.hpp>

#include <iostream>

int main() {
  // Three geologists value the same tract: one sums everyone's surveys, one
  // trusts the best survey, one only cares about their own.
  std::vector<idva::ValuationOracle> oracles;
  oracles.emplace_back(idva::FamilySpec::weighted_sum({1.0, 0.5, 0.5}), 0, 3);
  oracles.emplace_back(idva::FamilySpec::max_of_signals(0.01), 1, 3);
  oracles.emplace_back(idva::FamilySpec::affine_own(2.0, 0.1), 2, 3);
  const idva::Instance instance(std::move(oracles),
                                idva::SignalProfile({0.8, 0.4, 0.6}));

  std::cout << "instance:\n" << idva::instance_to_json(instance).dump(2) << "\n\n";

  const idva::MechanismOutcome sos = idva::sos::run(instance);
  std::cout << "submodular mechanism:\n" << idva::outcome_to_json(sos).dump(2) << "\n\n";

  const idva::MechanismOutcome kdep = idva::kdep::run(instance);
  std::cout << "bounded-dependency mechanism:\n"
            << idva::outcome_to_json(kdep).dump(2) << "\n\n";

  const idva::ChiBoundReport graph = idva::verify_chi_bound(instance);
  std::cout << "feasibility graph: max out-degree " << graph.max_out_degree << " (bound "
            << graph.degree_bound << "), colored with " << graph.colors_used
            << " colors (bound " << graph.color_bound << ")\n\n";

  idva::SplitMix64 rng(2026);
  std::cout << "ten lottery draws from the submodular allocation:";
  for (int draw = 0; draw < 10; ++draw) {
    const auto winner = idva::experiment::sample_lottery(sos.allocation, rng);
    std::cout << ' ' << (winner ? std::to_string(*winner) : std::string("none"));
  }
  std::cout << '\n';
  return 0;
}
