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

#include <idva/step_function.hpp>

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace idva;

TEST_CASE("step functions evaluate on left-open right-closed pieces") {
  const StepFunction f({1.0, 3.0}, {0.9, 0.5, 0.1});
  CHECK(f(0.0) == 0.9);
  CHECK(f(1.0) == 0.9);   // breakpoint belongs to the piece on its left
  CHECK(f(1.0000001) == 0.5);
  CHECK(f(3.0) == 0.5);
  CHECK(f(100.0) == 0.1);
}

TEST_CASE("step function validation") {
  CHECK_THROWS_AS(StepFunction({1.0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({2.0, 1.0}, {0.1, 0.2, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({1.0, 1.0}, {0.1, 0.2, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({1.0}, {0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({1.0}, {-0.5, 0.5}), std::invalid_argument);
  // Monotonicity is deliberately not required: broken mechanisms build
  // decreasing curves and the battery has to observe them as-is.
  CHECK_NOTHROW(StepFunction({1.0}, {0.9, 0.1}));
}

TEST_CASE("integration is an exact interval sum") {
  const StepFunction f({1.0, 3.0}, {0.9, 0.5, 0.1});
  CHECK(f.integrate(0.0, 1.0) == 0.9);
  CHECK(f.integrate(0.0, 2.0) == 0.9 + 0.5);
  CHECK(f.integrate(0.0, 3.0) == 0.9 + 2.0 * 0.5);
  CHECK(f.integrate(0.0, 4.0) == Catch::Approx(0.9 + 1.0 + 0.1).epsilon(1e-15));
  CHECK(f.integrate(2.0, 2.5) == 0.5 * 0.5);
  CHECK(f.integrate(1.0, 3.0) == 2.0 * 0.5);
  CHECK(f.integrate(2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(f.integrate(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("integration agrees with adaptive quadrature") {
  const StepFunction f({0.3, 0.7, 1.9, 2.0}, {1.0, 0.8, 0.5, 0.2, 0.05});
  const auto g = [&](double t) { return f(t); };
  for (double hi : {0.2, 0.3, 0.9, 1.9, 2.4}) {
    CHECK(f.integrate(0.0, hi) ==
          Catch::Approx(testing::integrate_monotone(g, 0.0, hi)).margin(1e-8));
  }
}
