#include "perish/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace perish {

std::optional<std::size_t> first_available(std::span<const ItemState> items, std::size_t from) {
  for (std::size_t i = from; i < items.size(); ++i) {
    if (items[i] == ItemState::Available) return i;
  }
  return std::nullopt;
}

namespace {

const ValueDistribution& iid_values(const Instance& inst) {
  if (!inst.values.is_iid()) throw PolicyError("policy requires IID values");
  return *inst.values.iid;
}

class FixedPrice : public Policy {
 public:
  FixedPrice(ThresholdRule rule, std::string name) : rule_(rule), name_(std::move(name)) {}

  ThresholdRule post(const StepView&) override { return rule_; }
  std::optional<std::size_t> select(const StepView& view) override {
    // Items never become available again, so the lowest available index only moves forward.
    auto i = first_available(view.items, cursor_);
    if (i) cursor_ = *i;
    return i;
  }
  std::string name() const override { return name_; }

 private:
  ThresholdRule rule_;
  std::string name_;
  std::size_t cursor_ = 0;
};

class Balancing : public Policy {
 public:
  explicit Balancing(std::vector<ThresholdRule> rules) : rules_(std::move(rules)) {}

  ThresholdRule post(const StepView& view) override {
    if (view.available == 0) return ThresholdRule::reject_all();
    return rules_[view.available - 1];
  }
  std::optional<std::size_t> select(const StepView& view) override {
    auto i = first_available(view.items, cursor_);
    if (i) cursor_ = *i;
    return i;
  }
  std::string name() const override { return "balancing"; }

 private:
  std::vector<ThresholdRule> rules_;
  std::size_t cursor_ = 0;
};

class SingleItemSampling : public Policy {
 public:
  SingleItemSampling(std::size_t chosen, ThresholdRule rule) : chosen_(chosen), rule_(rule) {}

  ThresholdRule post(const StepView& view) override {
    if (view.items[chosen_] != ItemState::Available) {
      done_ = true;
      return ThresholdRule::reject_all();
    }
    return rule_;
  }
  std::optional<std::size_t> select(const StepView& view) override {
    if (view.items[chosen_] != ItemState::Available) return std::nullopt;
    done_ = true;
    return chosen_;
  }
  void on_departures(Step, std::span<const std::size_t> departed) override {
    if (std::find(departed.begin(), departed.end(), chosen_) != departed.end()) done_ = true;
  }
  bool finished() const override { return done_; }
  std::string name() const override { return "single_item"; }
  std::size_t chosen() const { return chosen_; }

 private:
  std::size_t chosen_;
  ThresholdRule rule_;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<Policy> fixed_price_multi(const Instance& inst, const ThresholdRule& rule) {
  (void)inst;
  return std::make_unique<FixedPrice>(rule, "fixed_price");
}

std::unique_ptr<Policy> single_fixed_price(const Instance& inst) {
  if (inst.m() != 1) throw PolicyError("single_fixed_price needs exactly one item");
  const auto& v = iid_values(inst);
  return std::make_unique<FixedPrice>(threshold_for_acceptance(v, 1.0 / inst.horizons[0].mean()), "single_fixed");
}

std::unique_ptr<Policy> blind_match(const Instance&) {
  return std::make_unique<FixedPrice>(ThresholdRule::accept_all(), "blind");
}

std::unique_ptr<Policy> balancing_dynamic_geometric(const Instance& inst) {
  const auto& v = iid_values(inst);
  const auto* g = std::get_if<Geometric>(&inst.horizons.front().family());
  if (!g) throw PolicyError("balancing needs geometric horizons");
  for (const auto& h : inst.horizons) {
    const auto* gi = std::get_if<Geometric>(&h.family());
    if (!gi || gi->mean != g->mean) throw PolicyError("balancing needs identical geometric horizons");
  }
  const double lambda = 1.0 / g->mean;
  if (static_cast<double>(inst.m()) * lambda > 1.0 + 1e-12) throw PolicyError("balancing needs m * lambda <= 1");
  std::vector<ThresholdRule> rules;
  for (std::size_t k = 1; k <= inst.m(); ++k)
    rules.push_back(threshold_for_acceptance(v, std::min(1.0, static_cast<double>(k) * lambda)));
  return std::make_unique<Balancing>(std::move(rules));
}

std::unique_ptr<Policy> single_item_sampling(const Instance& inst, const StagePlan& plan, std::uint64_t seed) {
  const auto& v = iid_values(inst);
  std::vector<double> q(inst.m());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = inst.horizons[i].survival(plan.final_start);
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(total > 0.0)) throw PolicyError("no item can reach the final stage");
  Rng rng = make_rng(seed);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t chosen = q.size() - 1;
  for (std::size_t i = 0; i < q.size(); ++i) {
    acc += q[i];
    if (u < acc && q[i] > 0.0) {
      chosen = i;
      break;
    }
  }
  while (q[chosen] <= 0.0) --chosen;
  const auto rule = threshold_for_acceptance(v, 1.0 / inst.horizons[chosen].mean());
  return std::make_unique<SingleItemSampling>(chosen, rule);
}

// ---------------------------------------------------------------------------

double DepartureSimulation::sampling_probability(const HorizonDistribution& h, const StagePlan& plan, int k) {
  if (k >= plan.s) return 1.0;  // stage k+1 is the final stage: r_{k+1} is infinite
  const Step l_next = plan.stages[static_cast<std::size_t>(k)].l;
  const Step r_next = plan.stages[static_cast<std::size_t>(k)].r;
  const double base = h.survival(l_next - 1);
  if (!(base > 0.0)) return 1.0;
  return std::clamp((base - h.survival(r_next)) / base, 0.0, 1.0);
}

DepartureSimulation::DepartureSimulation(const Instance& inst, const StagePlan& plan, Parity parity,
                                         std::uint64_t seed)
    : inst_(&inst), plan_(plan), parity_(parity), rng_(make_rng(seed)), in_a_(inst.m(), 1) {
  const auto& v = iid_values(inst);
  if (plan.m != inst.m()) throw PolicyError("stage plan built for a different item count");
  Step elapsed = 0;
  for (int k = parity == Parity::Odd ? 1 : 2; k <= plan.s; k += 2) {
    const Stage& st = plan.stages[static_cast<std::size_t>(k - 1)];
    const Step len = std::max<Step>(0, st.length() - 1);
    ThresholdRule rule = ThresholdRule::reject_all();
    if (st.length() >= 2) {
      const double target = std::min(1.0, plan.budget(k) / static_cast<double>(st.length()));
      rule = threshold_for_acceptance(v, target);
    }
    segments_.push_back({k, elapsed + 1, len, rule});
    elapsed += len;
  }
}

void DepartureSimulation::begin_segment(std::size_t idx, const StepView& view) {
  const Segment& seg = segments_[idx];
  candidates_.clear();
  for (std::size_t i = 0; i < in_a_.size(); ++i) {
    if (!in_a_[i]) continue;
    if (view.items[i] != ItemState::Available) {
      in_a_[i] = 0;
      continue;
    }
    const double p = sampling_probability(inst_->horizons[i], plan_, seg.k);
    if (uniform01(rng_) < p) {
      candidates_.push_back(i);
      in_a_[i] = 0;
    }
  }
  log_.push_back({seg.k, seg.start, seg.length, candidates_});
  active_ = idx;
}

ThresholdRule DepartureSimulation::post(const StepView& view) {
  last_step_ = view.step;
  while (next_segment_ < segments_.size() && segments_[next_segment_].start <= view.step) {
    begin_segment(next_segment_, view);
    ++next_segment_;
  }
  if (!active_) return ThresholdRule::reject_all();
  const Segment& seg = segments_[*active_];
  if (view.step >= seg.start + seg.length) return ThresholdRule::reject_all();
  for (std::size_t i : candidates_) {
    if (view.items[i] == ItemState::Available) return seg.rule;
  }
  return ThresholdRule::reject_all();
}

std::optional<std::size_t> DepartureSimulation::select(const StepView& view) {
  for (std::size_t i : candidates_) {
    if (view.items[i] == ItemState::Available) return i;
  }
  return std::nullopt;
}

bool DepartureSimulation::finished() const {
  if (segments_.empty()) return true;
  if (next_segment_ < segments_.size()) return false;
  const Segment& last = segments_.back();
  return last_step_ >= last.start + last.length - 1;
}

std::string DepartureSimulation::name() const { return parity_ == Parity::Odd ? "odd" : "even"; }

std::unique_ptr<Policy> departure_simulation(const Instance& inst, const StagePlan& plan, Parity parity,
                                             std::uint64_t seed) {
  return std::make_unique<DepartureSimulation>(inst, plan, parity, seed);
}

// ---------------------------------------------------------------------------

std::string to_string(MhrBranch b) {
  switch (b) {
    case MhrBranch::Odd: return "odd";
    case MhrBranch::Even: return "even";
    case MhrBranch::Blind: return "blind";
    case MhrBranch::SingleItem: return "single_item";
  }
  return "?";
}

std::vector<double> multiple_mhr_weights() {
  return {15.1 / 52.5, 15.1 / 52.5, 2.3 / 52.5, 20.0 / 52.5};
}

MhrBranch draw_mhr_branch(Rng& rng) {
  const auto w = multiple_mhr_weights();
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) {
    acc += w[b];
    if (u < acc) return static_cast<MhrBranch>(b);
  }
  return MhrBranch::SingleItem;
}

MultipleMhr::MultipleMhr(const Instance& inst, const StagePlan& plan, std::uint64_t seed) {
  for (const auto& h : inst.horizons) {
    if (!is_mhr(h, inst.time_cap)) throw PolicyError("multiple_mhr needs MHR horizons");
  }
  Rng rng = make_rng(seed);
  branch_ = draw_mhr_branch(rng);
  const std::uint64_t sub = derive_seed(seed, 1);
  switch (branch_) {
    case MhrBranch::Odd: inner_ = departure_simulation(inst, plan, Parity::Odd, sub); break;
    case MhrBranch::Even: inner_ = departure_simulation(inst, plan, Parity::Even, sub); break;
    case MhrBranch::Blind: inner_ = blind_match(inst); break;
    case MhrBranch::SingleItem: inner_ = single_item_sampling(inst, plan, sub); break;
  }
}

std::unique_ptr<Policy> multiple_mhr(const Instance& inst, const StagePlan& plan, std::uint64_t seed) {
  return std::make_unique<MultipleMhr>(inst, plan, seed);
}

// ---------------------------------------------------------------------------

TwoPointResult two_point_optimal_single(double mu, double p) {
  if (!(mu >= 1.0)) throw std::invalid_argument("mean horizon must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  const double q = 1.0 - 1.0 / mu;
  const double v_low = 1.0;
  // Probability the item ever meets a high buyer while waiting for one.
  const double reach = p / (1.0 - q * (1.0 - p));
  double v_high;
  if (q == 0.0) {
    v_high = 1.0 / p;  // both options coincide for any v_high
  } else {
    v_high = v_low * (1.0 - p) / (reach - p);
  }
  const double take_first = v_low * (1.0 - p) + v_high * p;
  const double wait_high = v_high * reach;
  const double alg = std::max(take_first, wait_high);
  const double pro = v_high * reach + v_low * (1.0 - reach);
  return {v_low, v_high, alg, pro, pro / alg};
}

Instance two_point_instance(double mu, double p) {
  const auto r = two_point_optimal_single(mu, p);
  ValueDistribution v(DiscreteAtoms{{{r.v_low, 1.0 - p}, {r.v_high, p}}});
  return make_iid_instance(1, HorizonDistribution(Geometric{mu}), v);
}

// ---------------------------------------------------------------------------

PolicyFactory make_policy_factory(const Instance& inst, const std::string& spec, double rho) {
  const Instance* ip = &inst;
  auto plan_for = [&] { return std::make_shared<StagePlan>(build_stage_plan(inst, rho)); };
  if (spec == "single_fixed") return [ip](std::uint64_t) { return single_fixed_price(*ip); };
  if (spec == "blind") return [ip](std::uint64_t) { return blind_match(*ip); };
  if (spec == "balancing") return [ip](std::uint64_t) { return balancing_dynamic_geometric(*ip); };
  if (spec == "multiple_mhr") return [ip, plan = plan_for()](std::uint64_t s) { return multiple_mhr(*ip, *plan, s); };
  if (spec == "odd") return [ip, plan = plan_for()](std::uint64_t s) { return departure_simulation(*ip, *plan, Parity::Odd, s); };
  if (spec == "even") return [ip, plan = plan_for()](std::uint64_t s) { return departure_simulation(*ip, *plan, Parity::Even, s); };
  if (spec == "single_item") return [ip, plan = plan_for()](std::uint64_t s) { return single_item_sampling(*ip, *plan, s); };
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    double x = 0.0;
    try {
      std::size_t used = 0;
      x = std::stod(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw PolicyError("bad policy parameter in '" + spec + "'");
    }
    const auto& v = iid_values(inst);
    if (kind == "fixed") {
      const ThresholdRule rule = price_rule(v, x);
      return [ip, rule](std::uint64_t) { return fixed_price_multi(*ip, rule); };
    }
    if (kind == "accept") {
      const ThresholdRule rule = threshold_for_acceptance(v, x);
      return [ip, rule](std::uint64_t) { return fixed_price_multi(*ip, rule); };
    }
  }
  throw PolicyError("unknown policy '" + spec + "'");
}

}  // namespace perish
