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

#include <idva/core.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace idva;

TEST_CASE("signal profiles validate their coordinates") {
  CHECK_NOTHROW(SignalProfile({0.0, 0.5, 1.0}));
  CHECK_THROWS_AS(SignalProfile({-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(SignalProfile({1.1}), std::invalid_argument);
  CHECK_THROWS_AS(SignalProfile({std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(SignalProfile({std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}

TEST_CASE("substitute replaces exactly one coordinate") {
  const SignalProfile s({0.1, 0.2, 0.3});
  const SignalProfile t = substitute(s, 1, 0.9);
  CHECK(t[0] == 0.1);
  CHECK(t[1] == 0.9);
  CHECK(t[2] == 0.3);
  CHECK(s[1] == 0.2);
  CHECK_THROWS_AS(substitute(s, 3, 0.5), std::out_of_range);
  CHECK_THROWS_AS(substitute(s, 0, 1.5), std::invalid_argument);
}

TEST_CASE("query ledger counts distinct profiles per agent") {
  QueryLedger ledger(2);
  const SignalProfile a({0.25, 0.75});
  const SignalProfile b({0.25, 0.5});
  ledger.record(0, a);
  ledger.record(0, a);
  ledger.record(0, b);
  ledger.record(1, a);
  CHECK(ledger.count(0) == 2);
  CHECK(ledger.count(1) == 1);
  CHECK(ledger.max_count() == 2);
  CHECK(ledger.counts() == std::vector<std::size_t>{2, 1});
  CHECK_THROWS_AS(ledger.record(2, a), std::out_of_range);
}

TEST_CASE("family evaluation matches hand values") {
  const std::vector<double> s{0.5, 0.25};
  CHECK(FamilySpec::weighted_sum({1.0, 2.0}).evaluate(s, 0) == 1.0);
  CHECK(FamilySpec::mineral_rights_average(0.5).evaluate({1.0, 0.0}, 0) == 1.0);
  CHECK(FamilySpec::max_of_signals(0.25).evaluate({0.5, 1.0}, 1) == 1.25);
  CHECK(FamilySpec::concave_of_sum({1.0, 1.0}, 0.5).evaluate({0.25, 0.0}, 0) == 0.5);
  CHECK(FamilySpec::product(0.5).evaluate({0.5, 0.5}, 0) == 0.5);
  CHECK(FamilySpec::affine_own(2.0, 0.1).evaluate({0.0, 0.45}, 1) == 1.0);
  CHECK(FamilySpec::lifted_product(1.0, 1.0).evaluate({1.0, 0.5, 0.5}, 0) == 3.0);
}

TEST_CASE("product can restrict its factor set") {
  const FamilySpec f = FamilySpec::product(1e-6, std::vector<AgentIndex>{0, 2});
  CHECK(f.evaluate({0.5, 0.0, 0.5}, 0) == 0.25 + 1e-6 * 0.5);
  CHECK(f.support(3, 0) == std::vector<AgentIndex>{2});
}

TEST_CASE("custom tables interpolate multilinearly and hit knots exactly") {
  // axis 0 slowest: v(0,0)=0, v(0,1)=0.5, v(1,0)=1, v(1,1)=2
  const FamilySpec f = FamilySpec::custom_table(2, {0.0, 0.5, 1.0, 2.0});
  CHECK(f.evaluate({1.0, 0.0}, 0) == 1.0);
  CHECK(f.evaluate({0.0, 1.0}, 0) == 0.5);
  CHECK(f.evaluate({1.0, 1.0}, 0) == 2.0);
  CHECK(f.evaluate({0.5, 0.5}, 0) == Catch::Approx(0.875).epsilon(1e-14));

  // Three knots per axis snap exactly at 0.5.
  const FamilySpec g = FamilySpec::custom_table(3, {0.0, 0.1, 0.2,
                                                    1.0, 1.1, 1.2,
                                                    2.0, 2.1, 2.2});
  CHECK(g.evaluate({0.5, 0.5}, 0) == 1.1);
  CHECK(g.evaluate({0.5, 0.0}, 0) == 1.0);
}

TEST_CASE("family validation rejects bad parameters") {
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::weighted_sum({1.0}), 0, 2),
                  std::invalid_argument);  // weights sized for wrong n
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::weighted_sum({0.0, 1.0}), 0, 2),
                  std::invalid_argument);  // zero own weight
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::weighted_sum({1.0, -0.5}), 0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::max_of_signals(0.0), 0, 2),
                  std::invalid_argument);  // max alone is not strictly increasing in own
  CHECK_NOTHROW(ValuationOracle(FamilySpec::mineral_rights_average(0.0), 0, 2));
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::concave_of_sum({1.0, 1.0}, 1.5), 0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::affine_own(0.0, 1.0), 0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ValuationOracle(FamilySpec::product(1e-6, std::vector<AgentIndex>{2, 0}), 0, 3),
      std::invalid_argument);  // unsorted factor set
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::custom_table(2, {0.0, 1.0, 0.5, 0.4}), 0, 2),
                  std::invalid_argument);  // decreasing along axis 1
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::custom_table(2, {0.0, 0.5, 0.0, 0.6}), 0, 2),
                  std::invalid_argument);  // flat along own axis
  CHECK_THROWS_AS(ValuationOracle(FamilySpec::lifted_product(1.0, 0.0), 0, 2),
                  std::invalid_argument);
}

TEST_CASE("oracle transforms compose and stay bitwise faithful") {
  const ValuationOracle base(FamilySpec::weighted_sum({1.0, 1.0}), 0, 2);
  const SignalProfile s({0.5, 0.25});
  const double v = base.value(s);
  CHECK(v == 0.75);

  CHECK(base.scaled(2.0).value(s) == 2.0 * v);
  CHECK(base.shifted(0.5).value(s) == v + 0.5);
  // scaled() scales an existing shift too, preserving scale(shift(v)).
  CHECK(base.shifted(0.5).scaled(2.0).value(s) == 2.0 * (v + 0.5));
  CHECK_THROWS_AS(base.scaled(0.0), std::invalid_argument);
  CHECK_THROWS_AS(base.scaled(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(base.shifted(-0.25), std::invalid_argument);

  // A warp maps the deviation knot to the true signal exactly, so the
  // warped oracle at the deviation profile reproduces the true value bitwise.
  const SignalWarp warp(0.3, 0.5);
  const ValuationOracle warped = base.warped(warp);
  CHECK(warped.value(substitute(s, 0, 0.3)) == v);
  CHECK_THROWS_AS(warped.warped(warp), std::invalid_argument);
  CHECK_THROWS_AS(SignalWarp(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SignalWarp(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("signal warps are strictly increasing bijections of [0,1]") {
  const SignalWarp warp(0.25, 0.8);
  CHECK(warp.apply(0.0) == 0.0);
  CHECK(warp.apply(1.0) == 1.0);
  CHECK(warp.apply(0.25) == 0.8);
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    const double w = warp.apply(t);
    CHECK(w > prev);
    CHECK((w >= 0.0 && w <= 1.0));
    prev = w;
  }
}

TEST_CASE("dependency declarations default to the family support") {
  const ValuationOracle sparse(FamilySpec::weighted_sum({1.0, 0.0, 0.5}), 0, 3);
  REQUIRE(sparse.declared_deps().has_value());
  CHECK(*sparse.declared_deps() == std::vector<AgentIndex>{2});

  const ValuationOracle priv(FamilySpec::affine_own(1.0, 0.0), 1, 3);
  REQUIRE(priv.declared_deps().has_value());
  CHECK(priv.declared_deps()->empty());

  const ValuationOracle undeclared(FamilySpec::weighted_sum({1.0, 0.0, 0.5}), 0, 3,
                                   std::nullopt);
  CHECK_FALSE(undeclared.declared_deps().has_value());

  const ValuationOracle overridden =
      sparse.with_deps(std::vector<AgentIndex>{1, 2});
  CHECK(*overridden.declared_deps() == std::vector<AgentIndex>{1, 2});

  CHECK_THROWS_AS(sparse.with_deps(std::vector<AgentIndex>{0}), std::invalid_argument);
  CHECK_THROWS_AS(sparse.with_deps(std::vector<AgentIndex>{3}), std::invalid_argument);
}

TEST_CASE("instances validate their shape") {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 1.0}), 0, 2);
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 1.0}), 1, 2);
  CHECK_NOTHROW(Instance(oracles, SignalProfile({0.5, 0.5})));
  CHECK_THROWS_AS(Instance(oracles, SignalProfile({0.5})), std::invalid_argument);

  std::vector<ValuationOracle> swapped{oracles[1], oracles[0]};
  CHECK_THROWS_AS(Instance(swapped, SignalProfile({0.5, 0.5})), std::invalid_argument);

  CHECK_THROWS_AS(Instance({}, SignalProfile(std::vector<double>{})), std::invalid_argument);
}

TEST_CASE("evaluate records distinct queries in the ledger") {
  const ValuationOracle oracle(FamilySpec::weighted_sum({1.0, 1.0}), 0, 2);
  QueryLedger ledger(2);
  const SignalProfile s({0.5, 0.5});
  evaluate(oracle, s, &ledger);
  evaluate(oracle, s, &ledger);
  evaluate(oracle, substitute(s, 1, 0.25), &ledger);
  CHECK(ledger.count(0) == 2);
  CHECK(ledger.count(1) == 0);
  CHECK(evaluate(oracle, s) == 1.0);
}
