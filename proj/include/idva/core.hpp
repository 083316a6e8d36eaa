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
//  Core data model for single-item auctions with interdependent values:
//  signal profiles on [0,1]^n, valuation oracles, query accounting, and
//  mechanism outcomes.  Everything is immutable after construction and
//  safe to share read-only across threads.
//
//------------------------------------------------------------------------------

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace idva {

using AgentIndex = std::size_t;
using Json = nlohmann::ordered_json;

/// Regularisation weight on the own signal for families that would otherwise
/// be only weakly increasing in it.
inline constexpr double kDefaultEps = 1e-6;

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

//------------------------------------------------------------------------------
// signal profiles
//------------------------------------------------------------------------------

/// One signal per agent, each in [0,1].  Validated once at construction.
class SignalProfile {
 public:
  SignalProfile() = default;

  explicit SignalProfile(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::invalid_argument("signal " + std::to_string(i) +
                                    " outside [0,1]: " + std::to_string(v));
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const SignalProfile&, const SignalProfile&) = default;

 private:
  std::vector<double> values_;
};

/// Copy of `s` with coordinate `i` replaced by `value`.
inline SignalProfile substitute(const SignalProfile& s, AgentIndex i, double value) {
  if (i >= s.size()) throw std::out_of_range("substitute: agent index out of range");
  std::vector<double> v = s.values();
  v[i] = value;
  return SignalProfile(std::move(v));
}

//------------------------------------------------------------------------------
// query accounting
//------------------------------------------------------------------------------

/// Counts distinct signal profiles evaluated per oracle.  Re-evaluating an
/// already-seen profile does not increase the count.  Profiles are keyed by a
/// 128-bit fingerprint of their bit patterns rather than stored whole.
class QueryLedger {
 public:
  QueryLedger() = default;
  explicit QueryLedger(std::size_t n) : seen_(n) {}

  void record(AgentIndex agent, const SignalProfile& s) {
    if (agent >= seen_.size()) throw std::out_of_range("ledger: agent index out of range");
    seen_[agent].insert(fingerprint(s));
  }

  std::size_t num_agents() const { return seen_.size(); }
  std::size_t count(AgentIndex agent) const { return seen_.at(agent).size(); }

  std::size_t max_count() const {
    std::size_t m = 0;
    for (const auto& s : seen_) m = std::max(m, s.size());
    return m;
  }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> c(seen_.size());
    for (std::size_t i = 0; i < seen_.size(); ++i) c[i] = seen_[i].size();
    return c;
  }

 private:
  static std::pair<std::uint64_t, std::uint64_t> fingerprint(const SignalProfile& s) {
    std::uint64_t a = detail::mix64(0x517cc1b727220a95ull ^ s.size());
    std::uint64_t b = detail::mix64(0x2545f4914f6cdd1dull ^ s.size());
    for (double d : s.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(d);
      a = detail::mix64(a ^ bits);
      b = detail::mix64(b + bits);
    }
    return {a, b};
  }

  std::vector<std::set<std::pair<std::uint64_t, std::uint64_t>>> seen_;
};

//------------------------------------------------------------------------------
// valuation families
//------------------------------------------------------------------------------

struct WeightedSum {
  std::vector<double> weights;
};

/// (sum_j s_j)/n + epsilon * s_own
struct MineralRightsAverage {
  double epsilon = kDefaultEps;
};

/// max_j s_j + epsilon * s_own
struct MaxOfSignals {
  double epsilon = kDefaultEps;
};

/// (sum_j w_j s_j)^gamma, gamma in (0,1]
struct ConcaveOfSum {
  std::vector<double> weights;
  double gamma = 1.0;
};

/// prod_{j in over} s_j + epsilon * s_own; `over` defaults to all agents.
struct Product {
  double epsilon = kDefaultEps;
  std::optional<std::vector<AgentIndex>> over;
};

/// slope * s_own + intercept (a private value)
struct AffineOwn {
  double slope = 1.0;
  double intercept = 0.0;
};

/// Multilinear interpolation over a uniform grid with `points_per_axis`
/// knots per axis; `values` is row-major with axis 0 slowest.  Evaluation is
/// exact at knots.
struct CustomTable {
  std::size_t points_per_axis = 2;
  std::vector<double> values;
};

/// (own_offset + s_own) * (others_offset + mean(s_others)).  Strictly
/// supermodular; the marginal ratio between comparable profiles is bounded
/// by 1 + 1/min(own_offset, others_offset).
struct LiftedProduct {
  double own_offset = 1.0;
  double others_offset = 1.0;
};

/// Tagged description of one valuation function, so instances serialize and
/// replay exactly.
class FamilySpec {
 public:
  using Data = std::variant<WeightedSum, MineralRightsAverage, MaxOfSignals, ConcaveOfSum,
                            Product, AffineOwn, CustomTable, LiftedProduct>;

  explicit FamilySpec(Data data) : data_(std::move(data)) {}

  static FamilySpec weighted_sum(std::vector<double> weights) {
    return FamilySpec(WeightedSum{std::move(weights)});
  }
  static FamilySpec mineral_rights_average(double epsilon = kDefaultEps) {
    return FamilySpec(MineralRightsAverage{epsilon});
  }
  static FamilySpec max_of_signals(double epsilon = kDefaultEps) {
    return FamilySpec(MaxOfSignals{epsilon});
  }
  static FamilySpec concave_of_sum(std::vector<double> weights, double gamma) {
    return FamilySpec(ConcaveOfSum{std::move(weights), gamma});
  }
  static FamilySpec product(double epsilon = kDefaultEps,
                            std::optional<std::vector<AgentIndex>> over = std::nullopt) {
    return FamilySpec(Product{epsilon, std::move(over)});
  }
  static FamilySpec affine_own(double slope, double intercept) {
    return FamilySpec(AffineOwn{slope, intercept});
  }
  static FamilySpec custom_table(std::size_t points_per_axis, std::vector<double> values) {
    return FamilySpec(CustomTable{points_per_axis, std::move(values)});
  }
  static FamilySpec lifted_product(double own_offset = 1.0, double others_offset = 1.0) {
    return FamilySpec(LiftedProduct{own_offset, others_offset});
  }

  const Data& data() const { return data_; }

  std::string kind() const {
    struct Visitor {
      std::string operator()(const WeightedSum&) const { return "weighted_sum"; }
      std::string operator()(const MineralRightsAverage&) const { return "mineral_rights_average"; }
      std::string operator()(const MaxOfSignals&) const { return "max_of_signals"; }
      std::string operator()(const ConcaveOfSum&) const { return "concave_of_sum"; }
      std::string operator()(const Product&) const { return "product"; }
      std::string operator()(const AffineOwn&) const { return "affine_own"; }
      std::string operator()(const CustomTable&) const { return "custom_table"; }
      std::string operator()(const LiftedProduct&) const { return "lifted_product"; }
    };
    return std::visit(Visitor{}, data_);
  }

  /// Throws std::invalid_argument unless the family is a valid valuation for
  /// agent `own` among `n` agents: finite, nonnegative, non-decreasing in
  /// every signal and strictly increasing in the own signal.
  void validate(std::size_t n, AgentIndex own) const;

  double evaluate(const std::vector<double>& s, AgentIndex own) const;

  /// Agents other than `own` whose signal can change the value.
  std::vector<AgentIndex> support(std::size_t n, AgentIndex own) const;

 private:
  Data data_;
};

//------------------------------------------------------------------------------
// signal warps
//------------------------------------------------------------------------------

/// Strictly increasing piecewise-linear bijection of [0,1] with a single
/// interior knot; apply(knot_in) == knot_out bitwise.
struct SignalWarp {
  double knot_in = 0.5;
  double knot_out = 0.5;

  SignalWarp(double in, double out) : knot_in(in), knot_out(out) {
    if (!(in > 0.0 && in < 1.0 && out > 0.0 && out < 1.0)) {
      throw std::invalid_argument("signal warp knot must be interior to (0,1)");
    }
  }

  double apply(double t) const {
    if (t == knot_in) return knot_out;
    if (t < knot_in) return knot_out * (t / knot_in);
    return knot_out + (1.0 - knot_out) * ((t - knot_in) / (1.0 - knot_in));
  }
};

//------------------------------------------------------------------------------
// valuation oracles
//------------------------------------------------------------------------------

/// One agent's valuation: a family spec plus an optional validity-preserving
/// transform (positive scale, nonnegative shift, own-signal warp).  Oracles
/// are deterministic and immutable.
class ValuationOracle {
 public:
  /// Dependency declaration defaults to the family's support.
  ValuationOracle(FamilySpec family, AgentIndex own, std::size_t n)
      : ValuationOracle(std::move(family), own, n, std::nullopt, {}, true) {}

  ValuationOracle(FamilySpec family, AgentIndex own, std::size_t n,
                  std::optional<std::vector<AgentIndex>> deps)
      : ValuationOracle(std::move(family), own, n, std::move(deps), {}, false) {}

  AgentIndex own_index() const { return own_; }
  std::size_t num_agents() const { return n_; }
  const FamilySpec& family() const { return family_; }
  const std::optional<std::vector<AgentIndex>>& declared_deps() const { return deps_; }

  double scale() const { return transform_.scale; }
  double shift() const { return transform_.shift; }
  const std::optional<SignalWarp>& warp() const { return transform_.warp; }

  /// Raw evaluation (no ledger).  Validates the profile length.
  double value(const SignalProfile& s) const {
    if (s.size() != n_) throw std::invalid_argument("profile size does not match oracle");
    double v;
    if (transform_.warp) {
      const SignalProfile warped = substitute(s, own_, transform_.warp->apply(s[own_]));
      v = family_.evaluate(warped.values(), own_);
    } else {
      v = family_.evaluate(s.values(), own_);
    }
    return transform_.scale * v + transform_.shift;
  }

  ValuationOracle scaled(double c) const {
    if (!(std::isfinite(c) && c > 0.0)) throw std::invalid_argument("scale must be positive");
    Transform t = transform_;
    t.scale *= c;
    t.shift *= c;
    return ValuationOracle(family_, own_, n_, deps_, t);
  }

  ValuationOracle shifted(double b) const {
    if (!(std::isfinite(b) && b >= 0.0)) throw std::invalid_argument("shift must be nonnegative");
    Transform t = transform_;
    t.shift += b;
    return ValuationOracle(family_, own_, n_, deps_, t);
  }

  ValuationOracle warped(SignalWarp w) const {
    if (transform_.warp) throw std::invalid_argument("oracle already carries a warp");
    Transform t = transform_;
    t.warp = w;
    return ValuationOracle(family_, own_, n_, deps_, t);
  }

  /// Same oracle with a different dependency declaration.
  ValuationOracle with_deps(std::optional<std::vector<AgentIndex>> deps) const {
    return ValuationOracle(family_, own_, n_, std::move(deps), transform_);
  }

 private:
  struct Transform {
    double scale = 1.0;
    double shift = 0.0;
    std::optional<SignalWarp> warp;
  };

  ValuationOracle(FamilySpec family, AgentIndex own, std::size_t n,
                  std::optional<std::vector<AgentIndex>> deps, Transform transform,
                  bool auto_deps = false)
      : family_(std::move(family)), own_(own), n_(n), transform_(transform) {
    if (n == 0) throw std::invalid_argument("oracle needs at least one agent");
    if (own >= n) throw std::invalid_argument("own index out of range");
    family_.validate(n, own);
    if (auto_deps) {
      deps_ = family_.support(n, own);
    } else {
      deps_ = std::move(deps);
      if (deps_) {
        std::sort(deps_->begin(), deps_->end());
        deps_->erase(std::unique(deps_->begin(), deps_->end()), deps_->end());
        for (AgentIndex j : *deps_) {
          if (j >= n) throw std::invalid_argument("declared dependency out of range");
          if (j == own) throw std::invalid_argument("declared dependency on own signal");
        }
      }
    }
  }

  FamilySpec family_;
  AgentIndex own_;
  std::size_t n_;
  std::optional<std::vector<AgentIndex>> deps_;
  Transform transform_;
};

/// Validated evaluation with query accounting.
inline double evaluate(const ValuationOracle& oracle, const SignalProfile& s,
                       QueryLedger* ledger = nullptr) {
  if (s.size() != oracle.num_agents()) {
    throw std::invalid_argument("profile size does not match oracle");
  }
  if (ledger != nullptr) ledger->record(oracle.own_index(), s);
  return oracle.value(s);
}

//------------------------------------------------------------------------------
// instances and outcomes
//------------------------------------------------------------------------------

/// A complete auction instance: one oracle per agent plus the realised
/// signal profile.
struct Instance {
  std::vector<ValuationOracle> oracles;
  SignalProfile signals;

  Instance(std::vector<ValuationOracle> oracles_in, SignalProfile signals_in)
      : oracles(std::move(oracles_in)), signals(std::move(signals_in)) {
    if (oracles.empty()) throw std::invalid_argument("instance needs at least one agent");
    if (signals.size() != oracles.size()) {
      throw std::invalid_argument("signal profile size does not match agent count");
    }
    for (std::size_t i = 0; i < oracles.size(); ++i) {
      if (oracles[i].num_agents() != oracles.size()) {
        throw std::invalid_argument("oracle " + std::to_string(i) + " sized for wrong n");
      }
      if (oracles[i].own_index() != i) {
        throw std::invalid_argument("oracle " + std::to_string(i) + " has mismatched own index");
      }
    }
  }

  std::size_t n() const { return oracles.size(); }
};

/// Allocation probabilities, payments, query counts and mechanism-specific
/// diagnostics for one run.
struct MechanismOutcome {
  std::vector<double> allocation;
  std::vector<double> payments;
  QueryLedger ledger;
  Json diagnostics;
};

//------------------------------------------------------------------------------
// family implementations
//------------------------------------------------------------------------------

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline std::size_t table_size(std::size_t points_per_axis, std::size_t n) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (size > (std::size_t{1} << 22) / points_per_axis) {
      throw std::invalid_argument("custom table too large");
    }
    size *= points_per_axis;
  }
  return size;
}

/// (cell index, fractional weight) along one axis, snapped to exact knots.
inline std::pair<std::size_t, double> table_cell(double s, std::size_t m) {
  const double scaled = s * static_cast<double>(m - 1);
  std::size_t k = static_cast<std::size_t>(scaled);
  if (k > m - 2) k = m - 2;
  double frac = scaled - static_cast<double>(k);
  if (s == static_cast<double>(k) / static_cast<double>(m - 1)) frac = 0.0;
  if (s == static_cast<double>(k + 1) / static_cast<double>(m - 1)) frac = 1.0;
  return {k, frac};
}

}  // namespace detail

inline void FamilySpec::validate(std::size_t n, AgentIndex own) const {
  using detail::require;
  struct Visitor {
    std::size_t n;
    AgentIndex own;

    void check_weights(const std::vector<double>& w) const {
      require(w.size() == n, "weights size does not match agent count");
      for (double x : w) require(std::isfinite(x) && x >= 0.0, "weights must be nonnegative");
      require(w[own] > 0.0, "own-signal weight must be positive");
    }

    void operator()(const WeightedSum& f) const { check_weights(f.weights); }
    void operator()(const MineralRightsAverage& f) const {
      require(std::isfinite(f.epsilon) && f.epsilon >= 0.0, "epsilon must be nonnegative");
    }
    void operator()(const MaxOfSignals& f) const {
      require(std::isfinite(f.epsilon) && f.epsilon > 0.0, "epsilon must be positive");
    }
    void operator()(const ConcaveOfSum& f) const {
      check_weights(f.weights);
      require(std::isfinite(f.gamma) && f.gamma > 0.0 && f.gamma <= 1.0, "gamma must be in (0,1]");
    }
    void operator()(const Product& f) const {
      require(std::isfinite(f.epsilon) && f.epsilon > 0.0, "epsilon must be positive");
      if (f.over) {
        for (AgentIndex j : *f.over) require(j < n, "product factor out of range");
        require(std::is_sorted(f.over->begin(), f.over->end()) &&
                    std::adjacent_find(f.over->begin(), f.over->end()) == f.over->end(),
                "product factors must be sorted and distinct");
      }
    }
    void operator()(const AffineOwn& f) const {
      require(std::isfinite(f.slope) && f.slope > 0.0, "slope must be positive");
      require(std::isfinite(f.intercept) && f.intercept >= 0.0, "intercept must be nonnegative");
    }
    void operator()(const CustomTable& f) const {
      require(f.points_per_axis >= 2, "table needs at least two points per axis");
      const std::size_t size = detail::table_size(f.points_per_axis, n);
      require(f.values.size() == size, "table size does not match points_per_axis^n");
      for (double v : f.values) require(std::isfinite(v) && v >= 0.0, "table values must be nonnegative");
      // Monotone along every axis, strictly along the own axis.
      std::size_t stride = 1;
      for (std::size_t axis = n; axis-- > 0;) {
        const std::size_t block = stride * f.points_per_axis;
        for (std::size_t base = 0; base < f.values.size(); base += block) {
          for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t k = 0; k + 1 < f.points_per_axis; ++k) {
              const double lo = f.values[base + off + k * stride];
              const double hi = f.values[base + off + (k + 1) * stride];
              if (axis == own) {
                require(hi > lo, "table must increase strictly along the own axis");
              } else {
                require(hi >= lo, "table must be non-decreasing along every axis");
              }
            }
          }
        }
        stride = block;
      }
    }
    void operator()(const LiftedProduct& f) const {
      require(std::isfinite(f.own_offset) && f.own_offset >= 0.0, "own offset must be nonnegative");
      require(std::isfinite(f.others_offset) && f.others_offset > 0.0, "others offset must be positive");
    }
  };
  std::visit(Visitor{n, own}, data_);
}

inline double FamilySpec::evaluate(const std::vector<double>& s, AgentIndex own) const {
  struct Visitor {
    const std::vector<double>& s;
    AgentIndex own;

    double operator()(const WeightedSum& f) const {
      double total = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) total += f.weights[j] * s[j];
      return total;
    }
    double operator()(const MineralRightsAverage& f) const {
      double total = 0.0;
      for (double x : s) total += x;
      return total / static_cast<double>(s.size()) + f.epsilon * s[own];
    }
    double operator()(const MaxOfSignals& f) const {
      double m = 0.0;
      for (double x : s) m = std::max(m, x);
      return m + f.epsilon * s[own];
    }
    double operator()(const ConcaveOfSum& f) const {
      double total = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) total += f.weights[j] * s[j];
      return std::pow(total, f.gamma);
    }
    double operator()(const Product& f) const {
      double prod = 1.0;
      if (f.over) {
        for (AgentIndex j : *f.over) prod *= s[j];
      } else {
        for (double x : s) prod *= x;
      }
      return prod + f.epsilon * s[own];
    }
    double operator()(const AffineOwn& f) const { return f.slope * s[own] + f.intercept; }
    double operator()(const CustomTable& f) const {
      const std::size_t n = s.size();
      std::vector<std::size_t> cell(n);
      std::vector<double> frac(n);
      for (std::size_t d = 0; d < n; ++d) {
        const auto [k, fr] = detail::table_cell(s[d], f.points_per_axis);
        cell[d] = k;
        frac[d] = fr;
      }
      double total = 0.0;
      for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
        double weight = 1.0;
        std::size_t index = 0;
        for (std::size_t d = 0; d < n && weight != 0.0; ++d) {
          const bool high = (corner >> d) & 1u;
          weight *= high ? frac[d] : 1.0 - frac[d];
          index = index * f.points_per_axis + cell[d] + (high ? 1 : 0);
        }
        if (weight != 0.0) total += weight * f.values[index];
      }
      return total;
    }
    double operator()(const LiftedProduct& f) const {
      double others = 0.0;
      if (s.size() > 1) {
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (j != own) others += s[j];
        }
        others /= static_cast<double>(s.size() - 1);
      }
      return (f.own_offset + s[own]) * (f.others_offset + others);
    }
  };
  return std::visit(Visitor{s, own}, data_);
}

inline std::vector<AgentIndex> FamilySpec::support(std::size_t n, AgentIndex own) const {
  auto all_others = [&] {
    std::vector<AgentIndex> out;
    out.reserve(n - 1);
    for (AgentIndex j = 0; j < n; ++j) {
      if (j != own) out.push_back(j);
    }
    return out;
  };
  struct Visitor {
    std::size_t n;
    AgentIndex own;
    decltype(all_others)& others;

    std::vector<AgentIndex> positive(const std::vector<double>& w) const {
      std::vector<AgentIndex> out;
      for (AgentIndex j = 0; j < n; ++j) {
        if (j != own && w[j] > 0.0) out.push_back(j);
      }
      return out;
    }

    std::vector<AgentIndex> operator()(const WeightedSum& f) const { return positive(f.weights); }
    std::vector<AgentIndex> operator()(const MineralRightsAverage&) const { return others(); }
    std::vector<AgentIndex> operator()(const MaxOfSignals&) const { return others(); }
    std::vector<AgentIndex> operator()(const ConcaveOfSum& f) const { return positive(f.weights); }
    std::vector<AgentIndex> operator()(const Product& f) const {
      if (!f.over) return others();
      std::vector<AgentIndex> out;
      for (AgentIndex j : *f.over) {
        if (j != own) out.push_back(j);
      }
      return out;
    }
    std::vector<AgentIndex> operator()(const AffineOwn&) const { return {}; }
    std::vector<AgentIndex> operator()(const CustomTable&) const { return others(); }
    std::vector<AgentIndex> operator()(const LiftedProduct&) const {
      return n > 1 ? others() : std::vector<AgentIndex>{};
    }
  };
  return std::visit(Visitor{n, own, all_others}, data_);
}

}  // namespace idva
