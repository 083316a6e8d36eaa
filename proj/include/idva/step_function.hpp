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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace idva {

/// Piecewise-constant function on left-open, right-closed intervals:
/// value(w) = levels[#{breakpoints < w}].  Integration is an exact sum of
/// interval lengths times levels, no quadrature involved.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
      : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (levels_.size() != breakpoints_.size() + 1) {
      throw std::invalid_argument("step function needs one more level than breakpoints");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i])) {
        throw std::invalid_argument("step function breakpoints must be finite");
      }
      if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
        throw std::invalid_argument("step function breakpoints must be strictly increasing");
      }
    }
    for (double level : levels_) {
      if (!std::isfinite(level) || level < 0.0 || level > 1.0) {
        throw std::invalid_argument("step function levels must be within [0,1]");
      }
    }
  }

  double operator()(double w) const {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), w);
    return levels_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }

  /// Exact integral over [lo, hi]; requires lo <= hi.
  double integrate(double lo, double hi) const {
    if (!(lo <= hi)) throw std::invalid_argument("integrate: lo must not exceed hi");
    double total = 0.0;
    double prev = lo;
    for (double b : breakpoints_) {
      if (b <= lo) continue;
      if (b >= hi) break;
      total += (b - prev) * (*this)(b);
      prev = b;
    }
    total += (hi - prev) * (*this)(hi);
    return total;
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

}  // namespace idva
