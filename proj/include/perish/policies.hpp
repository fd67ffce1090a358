#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perish/stages.hpp"

namespace perish {

enum class ItemState : std::uint8_t { Available, Matched, Departed };

// Everything a policy may observe at a step. Realized horizons are never exposed.
struct StepView {
  Step step;
  std::span<const ItemState> items;
  std::size_t available;
};

class Policy {
 public:
  virtual ~Policy() = default;

  // Price-posting mode.
  virtual ThresholdRule post(const StepView& view) = 0;
  // Called only when the buyer accepted the posted rule.
  virtual std::optional<std::size_t> select(const StepView& view) = 0;

  // Value-revealing mode: the buyer announces its value and the policy assigns directly.
  virtual bool reveals_value() const { return false; }
  virtual std::optional<std::size_t> assign(const StepView& /*view*/, double /*value*/) { return std::nullopt; }

  virtual void on_departures(Step /*step*/, std::span<const std::size_t> /*departed*/) {}
  // True once the policy will never match again; lets the simulator stop early.
  virtual bool finished() const { return false; }
  virtual std::string name() const = 0;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t policy_seed)>;

// Lowest-index available item at or after `from`.
std::optional<std::size_t> first_available(std::span<const ItemState> items, std::size_t from = 0);

class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::unique_ptr<Policy> fixed_price_multi(const Instance& inst, const ThresholdRule& rule);
std::unique_ptr<Policy> single_fixed_price(const Instance& inst);
std::unique_ptr<Policy> blind_match(const Instance& inst);
std::unique_ptr<Policy> balancing_dynamic_geometric(const Instance& inst);
std::unique_ptr<Policy> single_item_sampling(const Instance& inst, const StagePlan& plan, std::uint64_t seed);

enum class Parity { Odd, Even };

// Per-stage record kept by DepartureSimulation for diagnostics.
struct SegmentLog {
  int k;                               // original stage index
  Step start;                          // first real-time step of the segment
  Step length;                         // (r_k - l_k - 1)^+
  std::vector<std::size_t> candidates; // C_k as sampled
};

class DepartureSimulation : public Policy {
 public:
  DepartureSimulation(const Instance& inst, const StagePlan& plan, Parity parity, std::uint64_t seed);

  ThresholdRule post(const StepView& view) override;
  std::optional<std::size_t> select(const StepView& view) override;
  bool finished() const override;
  std::string name() const override;

  const std::vector<SegmentLog>& log() const { return log_; }
  // Probability an item of A enters C_k at the start of stage k.
  static double sampling_probability(const HorizonDistribution& h, const StagePlan& plan, int k);

 private:
  struct Segment {
    int k;
    Step start;
    Step length;
    ThresholdRule rule;
  };
  void begin_segment(std::size_t idx, const StepView& view);

  const Instance* inst_;
  StagePlan plan_;
  Parity parity_;
  Rng rng_;
  std::vector<Segment> segments_;
  std::size_t next_segment_ = 0;
  std::optional<std::size_t> active_;
  Step last_step_ = 0;
  std::vector<char> in_a_;
  std::vector<std::size_t> candidates_;
  std::vector<SegmentLog> log_;
};

std::unique_ptr<Policy> departure_simulation(const Instance& inst, const StagePlan& plan, Parity parity,
                                             std::uint64_t seed);

enum class MhrBranch { Odd, Even, Blind, SingleItem };
std::string to_string(MhrBranch b);
// Mixture weights in branch order, summing to 1.
std::vector<double> multiple_mhr_weights();
MhrBranch draw_mhr_branch(Rng& rng);

class MultipleMhr : public Policy {
 public:
  MultipleMhr(const Instance& inst, const StagePlan& plan, std::uint64_t seed);
  ThresholdRule post(const StepView& view) override { return inner_->post(view); }
  std::optional<std::size_t> select(const StepView& view) override { return inner_->select(view); }
  void on_departures(Step step, std::span<const std::size_t> d) override { inner_->on_departures(step, d); }
  bool finished() const override { return inner_->finished(); }
  std::string name() const override { return "multiple_mhr/" + inner_->name(); }

  MhrBranch branch() const { return branch_; }
  const Policy& inner() const { return *inner_; }

 private:
  MhrBranch branch_;
  std::unique_ptr<Policy> inner_;
};

std::unique_ptr<Policy> multiple_mhr(const Instance& inst, const StagePlan& plan, std::uint64_t seed);

struct TwoPointResult {
  double v_low;
  double v_high;
  double alg_star;
  double pro;
  double ratio;
};
TwoPointResult two_point_optimal_single(double mu, double p);
// The single-item instance behind two_point_optimal_single.
Instance two_point_instance(double mu, double p);

// Builds a factory from a textual policy name: single_fixed, multiple_mhr, balancing, blind,
// odd, even, single_item, fixed:<price>, accept:<prob>.
PolicyFactory make_policy_factory(const Instance& inst, const std::string& spec, double rho = 0.5);

}  // namespace perish
