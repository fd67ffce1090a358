#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perish/policies.hpp"

namespace perish {

struct StepRecord {
  Step step;
  ThresholdRule rule;
  double value;
  bool accepted;
  std::optional<std::size_t> matched;
  std::vector<std::size_t> departures;
};

struct EpisodeTrace {
  double welfare = 0.0;
  std::vector<Match> matches;
  std::vector<StepRecord> steps;  // filled only when recording
};

class AuditViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

EpisodeTrace run_episode(const Instance& inst, const Realization& r, Policy& policy, Rng& coin, bool record = false);
void write_episode_trace(std::ostream& os, const EpisodeTrace& trace);

struct MonteCarloResult {
  WelfareEstimate alg;
  WelfareEstimate pro;
  double ratio = 0.0;          // pro.mean / alg.mean
  double ratio_std_error = 0.0; // delta method over paired trials
};

MonteCarloResult monte_carlo(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                             std::uint64_t master_seed, bool couple_prophet = true, const ExecOptions& ex = {});
// Same trials, same streams, one thread, no OpenMP; kept as the reference the parallel kernel is checked against.
MonteCarloResult monte_carlo_serial(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                                    std::uint64_t master_seed, bool couple_prophet = true);

// Policy welfare only.
WelfareEstimate estimate_policy(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                                std::uint64_t master_seed, const ExecOptions& ex = {});

}  // namespace perish
