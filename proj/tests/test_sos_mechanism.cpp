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

#include <idva/sos_mechanism.hpp>

#include <idva/experiment.hpp>
#include <idva/valuations.hpp>

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

using namespace idva;

namespace {

Instance two_identical() {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 1.0}), 0, 2);
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 1.0}), 1, 2);
  return Instance(std::move(oracles), SignalProfile({1.0, 1.0}));
}

Instance two_asymmetric() {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::weighted_sum({1.0625, 1.0}), 0, 2);
  oracles.emplace_back(FamilySpec::weighted_sum({1.0, 1.0}), 1, 2);
  return Instance(std::move(oracles), SignalProfile({1.0, 1.0}));
}

}  // namespace

TEST_CASE("allocation level base at two agents") {
  // chi = 2*1*log2(2) + 1 = 3, base = (1/3) / (ln 2 + 1)
  const double expected = (1.0 / 3.0) * (1.0 / (std::log(2.0) + 1.0));
  CHECK(sos::level_base(2) == expected);
  CHECK(sos::level_base(2) == Catch::Approx(0.19687).margin(1e-5));
  CHECK(sos::threshold_factor(2) == 0.0);
  CHECK(sos::threshold_factor(4) == 0.5);
}

TEST_CASE("two identical agents split one cutoff level") {
  const Instance instance = two_identical();
  const MechanismOutcome out = sos::run(instance);
  const double base = sos::level_base(2);
  CHECK(out.allocation[0] == base / 2.0);
  CHECK(out.allocation[1] == base / 2.0);
  CHECK(out.payments[0] == 0.0);
  CHECK(out.payments[1] == 0.0);
}

TEST_CASE("an agent above every cutoff wins the full level and pays for it") {
  const Instance instance = two_asymmetric();
  const MechanismOutcome out = sos::run(instance);
  const double base = sos::level_base(2);
  // Agent 0's value 2.0625 clears agent 1's cutoff at 2.0: empty support
  // set, full level, and an area price equal to one cutoff's worth.
  CHECK(out.allocation[0] == base);
  CHECK(out.payments[0] == Catch::Approx(base).epsilon(1e-12));
  CHECK(out.allocation[1] == base / 2.0);
  CHECK(out.payments[1] == 0.0);
}

TEST_CASE("private value dominating a vanishing competitor") {
  const Instance instance = carl_daphne_fixture();
  const MechanismOutcome out = sos::run(instance);
  const double base = sos::level_base(2);
  CHECK(out.allocation[1] == base);        // value 100.000001 clears cutoff 2.0
  CHECK(out.payments[1] == Catch::Approx(base).epsilon(1e-12));
  CHECK(out.allocation[0] == base / 2.0);  // value 2 stays below cutoff 100.000001
  CHECK(out.payments[0] == 0.0);
}

TEST_CASE("allocating through the step function is bitwise identical") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const Instance instance = experiment::random_instance("weighted_sum", n, rng);
    const MechanismOutcome out = sos::run(instance);
    for (AgentIndex i = 0; i < n; ++i) {
      const StepFunction curve = sos::allocation_step_function(instance, i);
      const double w = instance.oracles[i].value(instance.signals);
      CHECK(out.allocation[i] == curve(w));
      CHECK(out.allocation[i] == sos::allocate(instance, i));
      CHECK(out.payments[i] == sos::payment(instance, i));
    }
  }
}

TEST_CASE("cutoffs use raised and zeroed probes only") {
  const Instance instance = two_asymmetric();
  QueryLedger ledger(2);
  const std::vector<double> cutoffs = sos::competitor_cutoffs(instance, 0, &ledger);
  CHECK(std::isnan(cutoffs[0]));
  CHECK(cutoffs[1] == 2.0);  // n = 2: low-side condition degenerates, hi probe only
  CHECK(ledger.count(1) == 2);
  CHECK(ledger.count(0) == 0);
}

TEST_CASE("allocations are feasible across sizes and families") {
  SplitMix64 rng(7);
  for (const std::string& family :
       {std::string("weighted_sum"), std::string("max_of_signals"),
        std::string("concave_of_sum"), std::string("mineral_rights_average")}) {
    for (std::size_t n : {1u, 2u, 3u, 5u, 9u, 17u}) {
      const Instance instance = experiment::random_instance(family, n, rng);
      const MechanismOutcome out = sos::run(instance);
      double total = 0.0;
      for (AgentIndex i = 0; i < n; ++i) {
        CHECK(out.allocation[i] >= 0.0);
        CHECK(out.allocation[i] <= 1.0);
        total += out.allocation[i];
      }
      CHECK(total <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("payments match quadrature against the allocation curve") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Instance instance = experiment::random_instance("weighted_sum", n, rng);
    for (AgentIndex i = 0; i < n; ++i) {
      const StepFunction curve = sos::allocation_step_function(instance, i);
      const double w = instance.oracles[i].value(instance.signals);
      const double area =
          testing::integrate_monotone([&](double t) { return curve(t); }, 0.0, w);
      CHECK(sos::payment(instance, i) ==
            Catch::Approx(curve(w) * w - area).margin(1e-8));
    }
  }
}

TEST_CASE("payments are nonnegative and never exceed value times allocation") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const Instance instance = experiment::random_instance("concave_of_sum", n, rng);
    const MechanismOutcome out = sos::run(instance);
    for (AgentIndex i = 0; i < n; ++i) {
      const double w = instance.oracles[i].value(instance.signals);
      CHECK(out.payments[i] >= 0.0);
      CHECK(out.payments[i] <= out.allocation[i] * w + 1e-15);
    }
  }
}

TEST_CASE("single agent gets the item for free") {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::affine_own(1.0, 0.5), 0, 1);
  const Instance instance(std::move(oracles), SignalProfile({0.25}));
  const MechanismOutcome out = sos::run(instance);
  CHECK(out.allocation[0] == 1.0);
  CHECK(out.payments[0] == 0.0);
}

TEST_CASE("query counts stay within the substitution-probe budget") {
  SplitMix64 rng(31);
  for (std::size_t n : {2u, 5u, 16u}) {
    const Instance instance = experiment::random_instance("mineral_rights_average", n, rng);
    const MechanismOutcome out = sos::run(instance);
    for (std::size_t c : out.ledger.counts()) {
      CHECK(c <= 2 * n - 1);
    }
  }
}

//------------------------------------------------------------------------------
// welfare certificate
//------------------------------------------------------------------------------

TEST_CASE("certificate on two identical agents") {
  const Instance instance = two_identical();
  const sos::WelfareCertificate cert = sos::welfare_certificate(instance);
  CHECK(cert.opt == 2.0);
  CHECK(cert.k_star == 0);
  CHECK(cert.t_kstar == 2.0);
  CHECK(cert.level_counts == std::vector<std::size_t>{2, 0, 0});
  // bound = opt / (2 * chi * (ln n + 1)) with chi = 3
  CHECK(cert.lower_bound ==
        Catch::Approx(2.0 / (2.0 * 3.0 * (std::log(2.0) + 1.0))).epsilon(1e-15));
  const MechanismOutcome out = sos::run(instance);
  for (AgentIndex i = 0; i < 2; ++i) {
    CHECK(cert.y[i] == out.allocation[i]);  // eligible set = the other agent
  }
}

TEST_CASE("certificate lower bounds the realised welfare") {
  SplitMix64 rng(47);
  for (const std::string& family :
       {std::string("weighted_sum"), std::string("max_of_signals"),
        std::string("concave_of_sum"), std::string("lifted_product")}) {
    for (std::size_t n : {2u, 3u, 6u, 12u, 33u}) {
      sos::Config config;
      config.d = family == "lifted_product" ? 2.0 : 1.0;
      const Instance instance = experiment::random_instance(family, n, rng);
      const MechanismOutcome out = sos::run(instance, config);
      const sos::WelfareCertificate cert = sos::welfare_certificate(instance, config);
      double welfare = 0.0;
      for (AgentIndex i = 0; i < n; ++i) {
        welfare += out.allocation[i] * instance.oracles[i].value(instance.signals);
        CHECK(cert.y[i] <= out.allocation[i]);
      }
      INFO(family << " n=" << n);
      CHECK(welfare >= cert.lower_bound);
      CHECK(cert.k_star <= static_cast<std::size_t>(std::bit_width(n) - 1));
    }
  }
}

TEST_CASE("certificate respects a chi override") {
  sos::Config config;
  config.chi_override = 12.0;
  const Instance instance = two_identical();
  const sos::WelfareCertificate cert = sos::welfare_certificate(instance, config);
  CHECK(cert.lower_bound ==
        Catch::Approx(2.0 / (2.0 * 12.0 * (std::log(2.0) + 1.0))).epsilon(1e-15));
  // y uses the same chi, so the pointwise bound still sits below x.
  const MechanismOutcome out = sos::run(instance, config);
  for (AgentIndex i = 0; i < 2; ++i) {
    CHECK(cert.y[i] <= out.allocation[i]);
  }
}

TEST_CASE("certificate requires at least two agents") {
  std::vector<ValuationOracle> oracles;
  oracles.emplace_back(FamilySpec::affine_own(1.0, 0.5), 0, 1);
  const Instance instance(std::move(oracles), SignalProfile({0.25}));
  CHECK_THROWS_AS(sos::welfare_certificate(instance), std::invalid_argument);
}

TEST_CASE("mechanism configuration validates") {
  sos::Config config;
  config.d = 0.5;
  CHECK_THROWS_AS(sos::run(two_identical(), config), std::invalid_argument);
  config.d = 1.0;
  config.chi_override = 0.5;
  CHECK_THROWS_AS(sos::run(two_identical(), config), std::invalid_argument);
}
