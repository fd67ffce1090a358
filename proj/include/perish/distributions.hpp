#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "perish/rng.hpp"

namespace perish {

using Step = std::int64_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

class DistributionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Horizon (item lifetime) distributions on {1, 2, ...}.

struct Geometric {
  double mean;
};
struct Deterministic {
  Step n;
};
struct UniformRange {
  Step lo, hi;
};
struct ExplicitPmf {
  std::vector<std::pair<Step, double>> probabilities;
};
// min(G, cap) where G is geometric; `mean` is the mean of the truncated law.
struct TruncatedGeometric {
  double mean;
  Step cap;
};

using HorizonFamily = std::variant<Geometric, Deterministic, UniformRange, ExplicitPmf, TruncatedGeometric>;

class HorizonDistribution {
 public:
  HorizonDistribution(HorizonFamily family);  // NOLINT: implicit from a family is convenient
  template <class F>
    requires(!std::same_as<std::remove_cvref_t<F>, HorizonFamily> && std::constructible_from<HorizonFamily, F>)
  HorizonDistribution(F&& f) : HorizonDistribution(HorizonFamily(std::forward<F>(f))) {}  // NOLINT

  const HorizonFamily& family() const { return family_; }
  double mean() const { return mean_; }
  // nullopt for unbounded support.
  std::optional<Step> support_max() const { return support_max_; }
  bool is_geometric() const { return std::holds_alternative<Geometric>(family_); }
  // Per-step continue probability of the underlying geometric (Geometric and TruncatedGeometric).
  double geometric_continue() const { return continue_; }

  // Pr[h >= t]
  double survival(Step t) const;
  // Pr[h = t]
  double pmf(Step t) const;
  // Pr[h >= t+1 | h >= t]
  double hazard_continue(Step t) const;
  Step sample(Rng& rng) const;

  std::string describe() const;

 private:
  HorizonFamily family_;
  double mean_ = 1.0;
  std::optional<Step> support_max_;
  double continue_ = 0.0;
  // ExplicitPmf: sorted support and tails[j] = Pr[h >= support[j]].
  std::vector<Step> support_;
  std::vector<double> masses_;
  std::vector<double> tails_;
};

bool is_mhr(const HorizonDistribution& d, Step cap);

struct SosdReport {
  bool holds = true;
  Step worst_c = 0;  // first violating c, 0 when none
};
SosdReport sosd_vs_geometric(const HorizonDistribution& d, Step c_max);

// ---------------------------------------------------------------------------
// Buyer value distributions.

struct DiscreteAtoms {
  std::vector<std::pair<double, double>> atoms;  // (value, mass), strictly increasing values
};
struct Pareto {
  double alpha;
  double cap = 1e9;
};

using ValueFamily = std::variant<DiscreteAtoms, Pareto>;

struct ThresholdRule {
  double price = kInf;
  double accept_prob_at_price = 0.0;
  double target_accept_prob = 0.0;

  bool accepts(double value, double coin) const {
    if (value > price) return true;
    return value == price && coin < accept_prob_at_price;
  }
  static ThresholdRule accept_all() { return {-kInf, 1.0, 1.0}; }
  static ThresholdRule reject_all() { return {kInf, 0.0, 0.0}; }
};

class ValueDistribution {
 public:
  ValueDistribution(ValueFamily family);  // NOLINT
  template <class F>
    requires(!std::same_as<std::remove_cvref_t<F>, ValueFamily> && std::constructible_from<ValueFamily, F>)
  ValueDistribution(F&& f) : ValueDistribution(ValueFamily(std::forward<F>(f))) {}  // NOLINT

  const ValueFamily& family() const { return family_; }
  bool is_discrete() const { return std::holds_alternative<DiscreteAtoms>(family_); }
  const std::vector<std::pair<double, double>>& atoms() const;
  const Pareto& pareto() const { return std::get<Pareto>(family_); }

  double mean() const { return mean_; }
  double tail_ge(double x) const;  // Pr[v >= x]
  double tail_gt(double x) const;  // Pr[v > x]

  // Monotone decreasing map from u in (0,1] to a value; uniform u gives a draw from the law.
  double from_upper_uniform(double u) const;
  double sample(Rng& rng) const { return from_upper_uniform(uniform_open0(rng)); }

  // E[v ; v accepted by rule] (not normalized).
  double partial_exp_accepted(const ThresholdRule& rule) const;

  // Mean lost by capping a Pareto law is at most this.
  double truncation_bias_bound() const;

  std::string describe() const;

 private:
  ValueFamily family_;
  double mean_ = 0.0;
  std::vector<double> tails_;  // discrete: tails_[j] = Pr[v >= a_j]
};

ValueDistribution uniform_int_values(int lo, int hi);
ValueDistribution point_mass(double v);

ThresholdRule threshold_for_acceptance(const ValueDistribution& v, double q);
// Rule that accepts exactly the values >= price.
ThresholdRule price_rule(const ValueDistribution& v, double price);
double cond_exp_accepted(const ValueDistribution& v, const ThresholdRule& rule);
double cond_exp_rejected(const ValueDistribution& v, const ThresholdRule& rule);

Step sample_horizon(const HorizonDistribution& d, Rng& rng);
double sample_value(const ValueDistribution& v, Rng& rng);

struct ValueProcess {
  // Exactly one of the two is used: per_step non-empty means PerStep mode.
  std::optional<ValueDistribution> iid;
  std::vector<ValueDistribution> per_step;

  static ValueProcess make_iid(ValueDistribution v) { return {std::move(v), {}}; }
  static ValueProcess make_per_step(std::vector<ValueDistribution> vs);

  bool is_iid() const { return iid.has_value(); }
  // Distribution of the buyer at `step` (1-based). Steps past the per-step list have no buyer (value 0).
  const ValueDistribution& at(Step step) const;
};

}  // namespace perish
