#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "perish/distributions.hpp"
#include "perish/parallel.hpp"
#include "perish/stats.hpp"

namespace perish {

constexpr Step kDefaultTimeCap = 1'000'000'000;

struct Instance {
  std::vector<HorizonDistribution> horizons;
  ValueProcess values;
  Step time_cap = kDefaultTimeCap;

  std::size_t m() const { return horizons.size(); }
  // Throws DistributionError on a malformed instance.
  void validate() const;
};

Instance make_iid_instance(std::size_t m, const HorizonDistribution& h, const ValueDistribution& v,
                           Step time_cap = kDefaultTimeCap);

struct Realization {
  std::vector<Step> horizons;
  std::vector<double> values;  // values[t-1] is the buyer arriving at step t

  Step T() const { return static_cast<Step>(values.size()); }
  double value_at(Step t) const { return values[static_cast<std::size_t>(t - 1)]; }
};

struct Match {
  std::size_t item;
  Step step;
  double value;
};

struct MatchingResult {
  double welfare = 0.0;
  std::vector<Match> assignment;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Step> sample_horizons(const Instance& inst, Rng& rng);
Realization realize(const Instance& inst, Rng& rng);
void write_trace(std::ostream& os, const Realization& r);

MatchingResult prophet_offline(const Realization& r);
double matching_bruteforce(const Realization& r);

// Greedy over horizon intervals. `sorted_horizons` ascending; `interval_values[j]` holds
// (a superset of the top candidates among) the buyers in (h_{j-1}, h_j].
double prophet_over_intervals(const std::vector<Step>& sorted_horizons,
                              const std::vector<std::vector<double>>& interval_values);

// Exact-in-distribution prophet welfare for IID values without materializing every buyer:
// only the top min(len, remaining items) order statistics of each interval are drawn.
double prophet_welfare_sampled(const Instance& inst, Rng& rng);

enum class ProphetMode { Auto, FullRealization, Sampled };

WelfareEstimate estimate_pro(const Instance& inst, std::size_t trials, std::uint64_t seed,
                             const ExecOptions& ex = {}, ProphetMode mode = ProphetMode::Auto);

}  // namespace perish
