#pragma once

#include <string>
#include <utility>
#include <vector>

#include "perish/bounds.hpp"
#include "perish/simulator.hpp"

namespace perish {

struct Quantity {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;  // zero for analytic quantities
  bool monte_carlo = false;
};

struct LowerBoundReport {
  std::string construction;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Quantity> quantities;
  double gap = 0.0;

  const Quantity& get(const std::string& name) const;
  void add(std::string name, double value) { quantities.push_back({std::move(name), value, 0.0, false}); }
  void add(std::string name, const WelfareEstimate& e) {
    quantities.push_back({std::move(name), e.mean, e.std_error, true});
  }
};

// --- low-rate geometric horizons with Pareto values

Instance gen_pareto_geometric(std::size_t m, double lambda, double alpha, double cap = 1e9);
LowerBoundReport eval_low_rate_geometric(std::size_t m, double lambda, double alpha, std::size_t trials,
                                         std::uint64_t seed, const ExecOptions& ex = {});

// --- fixed pricing is log log m away

double loglog_q(std::size_t m);
Instance gen_loglog(std::size_t m);
// Upper bound on any fixed price accepting values >= threshold.
double loglog_sing_bound(std::size_t m, const ValueDistribution& v, double threshold);
LowerBoundReport eval_loglog(std::size_t m, std::size_t trials, std::uint64_t seed, const ExecOptions& ex = {});

// One fixed-price episode, simulated only at accepting buyers. Same law as running
// fixed_price_multi through run_episode, at a cost proportional to the number of sales.
double fixed_price_episode_fast(const std::vector<Step>& horizons, const ValueDistribution& v,
                                const ThresholdRule& rule, Rng& rng);
WelfareEstimate estimate_fixed_price_fast(const Instance& inst, const ThresholdRule& rule, std::size_t trials,
                                          std::uint64_t seed, const ExecOptions& ex = {});

// --- general (non-MHR) horizons

struct GeneralHorizon {
  int c;
  int k;                      // 2^c
  Step n;                     // 2^{ck}
  std::vector<Step> checkpoints;  // 2^{ci}, i = 0..k
  std::vector<double> pi;     // Pr[h = checkpoints[i]]
  Instance instance;
};
GeneralHorizon gen_general_horizon(int c);

// Exact values of the two benchmarks on the construction.
double general_horizon_vpro_exact(const GeneralHorizon& g);
double general_horizon_pro_exact(const GeneralHorizon& g);
// One draw of max_i Pr[h >= 2^{ci}] M_i.
double general_horizon_vpro_sample(const GeneralHorizon& g, Rng& rng);
double general_horizon_vpro_upper(const GeneralHorizon& g);
// Lebesgue-sum lower bound on Pro with exact probabilities, and its closed-form simplification.
double general_horizon_pro_lower(const GeneralHorizon& g);
double general_horizon_pro_lower_closed(const GeneralHorizon& g);
LowerBoundReport eval_general_horizon(int c, std::size_t trials, std::uint64_t seed, const ExecOptions& ex = {});

// Distribution of the max of `count` IID draws, sampled by inverting F^count.
double sample_max_of(const ValueDistribution& v, double count, Rng& rng);

}  // namespace perish
