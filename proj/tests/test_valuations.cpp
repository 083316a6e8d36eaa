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

#include <idva/valuations.hpp>

#include <idva/rng.hpp>

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace idva;

TEST_CASE("signal-substitutes check accepts the submodular families") {
  CHECK(check_sos(ValuationOracle(FamilySpec::weighted_sum({1.0, 0.5, 0.25}), 0, 3), 4)
            .holds);
  CHECK(check_sos(ValuationOracle(FamilySpec::mineral_rights_average(0.5), 1, 3), 4).holds);
  CHECK(check_sos(ValuationOracle(FamilySpec::max_of_signals(0.25), 0, 3), 4).holds);
  CHECK(check_sos(ValuationOracle(FamilySpec::concave_of_sum({1.0, 1.0}, 0.5), 0, 2), 6)
            .holds);
  CHECK(check_sos(ValuationOracle(FamilySpec::affine_own(1.5, 0.25), 1, 2), 6).holds);
}

TEST_CASE("signal-substitutes check rejects the common-value product") {
  const ValuationOracle oracle(FamilySpec::product(1e-6), 0, 2);
  const CheckReport report = check_sos(oracle, 3);
  CHECK_FALSE(report.holds);
  REQUIRE(report.witness.has_value());
  // The witness marginals really do violate the claimed inequality.
  CHECK(report.witness->lhs < report.witness->rhs);
  // ... and even a generous constant factor does not rescue a product of
  // signals: the marginal ratio blows up as the lower profile approaches 0.
  CHECK_FALSE(check_sos(oracle, 3, 100.0).holds);
}

TEST_CASE("lifted product is approximately submodular with factor two") {
  for (std::size_t n : {2u, 3u, 4u}) {
    const ValuationOracle oracle(FamilySpec::lifted_product(1.0, 1.0), 0, n);
    CHECK(check_sos(oracle, 4, 2.0).holds);
    CHECK_FALSE(check_sos(oracle, 4, 1.0).holds);
  }
  // Looser offsets tighten the marginal ratio: with offsets >= 3 the factor
  // (1 + 1/3) < 2 already suffices at d = 1.5.
  CHECK(check_sos(ValuationOracle(FamilySpec::lifted_product(3.0, 3.0), 0, 3), 4, 1.5).holds);
}

TEST_CASE("signal-substitutes check agrees with the naive all-pairs oracle") {
  SplitMix64 rng(420);
  int submodular_seen = 0;
  int violating_seen = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const bool force = trial % 2 == 0;
    const AgentIndex own = trial % 4 < 2 ? 0 : 1;
    const std::size_t points = 3 + trial % 3;
    const FamilySpec table = testing::random_monotone_table(points, own, rng, force);
    const ValuationOracle oracle(table, own, 2);
    const bool fast = check_sos(oracle, points).holds;
    const bool naive = testing::naive_sos(oracle, points);
    INFO("trial " << trial << " points " << points << " own " << own);
    CHECK(fast == naive);
    if (force) CHECK(fast);
    submodular_seen += fast ? 1 : 0;
    violating_seen += fast ? 0 : 1;
  }
  // The generator really exercises both outcomes.
  CHECK(submodular_seen >= 25);
  CHECK(violating_seen >= 5);
}

TEST_CASE("approximate-factor check agrees with the naive oracle under d") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t points = 3 + trial % 2;
    const FamilySpec table = testing::random_monotone_table(points, 0, rng, false);
    const ValuationOracle oracle(table, 0, 2);
    for (double d : {1.0, 1.5, 4.0}) {
      INFO("trial " << trial << " d " << d);
      CHECK(check_sos(oracle, points, d).holds == testing::naive_sos(oracle, points, d));
    }
  }
}

TEST_CASE("single-crossing check accepts symmetric common values") {
  const Instance instance = sc_case1_fixture(3);
  CHECK(check_single_crossing(instance.oracles, 3).holds);
  CHECK(testing::naive_single_crossing(instance.oracles, 3));
}

TEST_CASE("single-crossing check rejects an agent dominated by a competitor") {
  // Agent 0 barely reacts to its own signal; agent 1 rides on it strongly.
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::weighted_sum({0.1, 0.0}), 0, 2);
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 0.5}), 1, 2);
  const CheckReport report = check_single_crossing(oracles, 3);
  CHECK_FALSE(report.holds);
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->coordinate == 0);
  REQUIRE(report.witness->other.has_value());
  CHECK(*report.witness->other == 1);
  CHECK_FALSE(testing::naive_single_crossing(oracles, 3));
}

TEST_CASE("single-crossing check matches the naive oracle on random tables") {
  SplitMix64 rng(1312);
  int rejected = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t points = 3;
    std::vector<ValuationOracle> oracles;
    oracles.emplace_back(testing::random_monotone_table(points, 0, rng, trial % 2 == 0), 0,
                         2);
    oracles.emplace_back(testing::random_monotone_table(points, 1, rng, trial % 3 == 0), 1,
                         2);
    const bool fast = check_single_crossing(oracles, points).holds;
    const bool naive = testing::naive_single_crossing(oracles, points);
    INFO("trial " << trial);
    CHECK(fast == naive);
    rejected += fast ? 0 : 1;
  }
  CHECK(rejected >= 5);  // random tables are not usually single-crossing
}

TEST_CASE("grid budget guards reject oversized exhaustive checks") {
  const ValuationOracle oracle(FamilySpec::weighted_sum(std::vector<double>(8, 1.0)), 0, 8);
  CHECK_THROWS_AS(check_sos(oracle, 9), std::invalid_argument);   // 9^8 > 1e6
  CHECK_THROWS_AS(check_sos(oracle, 1), std::invalid_argument);   // degenerate grid
  CHECK_THROWS_AS(check_sos(oracle, 4, 0.5), std::invalid_argument);
}

TEST_CASE("fixture catalogue") {
  for (const std::string& name : fixture_names()) {
    FixtureParams params;
    params.n = 4;
    params.k = 2;
    CHECK_NOTHROW(fixture(name, params));
  }
  CHECK_THROWS_AS(fixture("no_such_fixture"), std::invalid_argument);
}

TEST_CASE("two-agent common-value fixture values") {
  const Instance instance = alice_bob_fixture(1e-6);
  REQUIRE(instance.n() == 2);
  CHECK(instance.signals[0] == 1.0);
  CHECK(instance.signals[1] == 1.0);
  CHECK(instance.oracles[0].value(instance.signals) == 1.0 + 1e-6);
  CHECK(instance.oracles[1].value(instance.signals) == 1.0 + 1e-6);
}

TEST_CASE("asymmetric private/common fixture values") {
  const Instance instance = carl_daphne_fixture(100.0, 1e-6);
  CHECK(instance.oracles[0].value(instance.signals) == 2.0);
  CHECK(instance.oracles[1].value(instance.signals) == 100.0 + 1e-6);
}

TEST_CASE("bounded-dependency lower-bound fixture shape") {
  const Instance instance = kdep_lb1_fixture(5, 2);
  REQUIRE(instance.n() == 5);
  // Agents 0..2 depend exactly on the other members of the leading block.
  for (AgentIndex i = 0; i <= 2; ++i) {
    REQUIRE(instance.oracles[i].declared_deps().has_value());
    CHECK(instance.oracles[i].declared_deps()->size() == 2);
  }
  // The remaining agents have private values.
  for (AgentIndex i = 3; i < 5; ++i) {
    CHECK(instance.oracles[i].declared_deps()->empty());
  }
  CHECK(instance.oracles[0].value(instance.signals) == 1.0);
}
