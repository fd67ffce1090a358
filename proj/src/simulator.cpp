#include "perish/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace perish {

EpisodeTrace run_episode(const Instance& inst, const Realization& r, Policy& policy, Rng& coin, bool record) {
  const std::size_t m = r.horizons.size();
  if (m != inst.m()) throw std::invalid_argument("realization does not match the instance");
  std::vector<ItemState> items(m, ItemState::Available);
  std::vector<std::size_t> by_horizon(m);
  std::iota(by_horizon.begin(), by_horizon.end(), std::size_t{0});
  std::stable_sort(by_horizon.begin(), by_horizon.end(),
                   [&](std::size_t a, std::size_t b) { return r.horizons[a] < r.horizons[b]; });
  std::size_t next_departure = 0;
  std::size_t available = m;
  EpisodeTrace trace;
  std::vector<std::size_t> departed;

  for (Step t = 1; t <= r.T() && available > 0 && !policy.finished(); ++t) {
    const StepView view{t, items, available};
    const double value = r.value_at(t);
    const double u = uniform01(coin);
    ThresholdRule rule = ThresholdRule::reject_all();
    bool accepted = false;
    std::optional<std::size_t> chosen;
    if (policy.reveals_value()) {
      chosen = policy.assign(view, value);
      accepted = chosen.has_value();
    } else {
      rule = policy.post(view);
      accepted = rule.accepts(value, u);
      if (accepted) chosen = policy.select(view);
    }
    if (chosen) {
      const std::size_t i = *chosen;
      if (i >= m || items[i] != ItemState::Available || r.horizons[i] < t)
        throw AuditViolation("policy " + policy.name() + " matched an unavailable item");
      items[i] = ItemState::Matched;
      --available;
      trace.welfare += value;
      trace.matches.push_back({i, t, value});
    }
    departed.clear();
    while (next_departure < m && r.horizons[by_horizon[next_departure]] == t) {
      const std::size_t i = by_horizon[next_departure++];
      if (items[i] == ItemState::Available) {
        items[i] = ItemState::Departed;
        --available;
        departed.push_back(i);
      }
    }
    if (!departed.empty()) policy.on_departures(t, departed);
    if (record) trace.steps.push_back({t, rule, value, accepted, chosen, departed});
  }
  return trace;
}

void write_episode_trace(std::ostream& os, const EpisodeTrace& trace) {
  for (const auto& s : trace.steps) {
    os << "step " << s.step << " price " << s.rule.price << " atom " << s.rule.accept_prob_at_price << " value "
       << s.value << (s.accepted ? " accept" : " reject");
    if (s.matched) os << " item " << *s.matched;
    for (std::size_t d : s.departures) os << " depart " << d;
    os << '\n';
  }
  os << "welfare " << trace.welfare << '\n';
}

namespace {

struct TrialOutcome {
  double alg = 0.0;
  double pro = 0.0;
};

TrialOutcome one_trial(const Instance& inst, const PolicyFactory& factory, std::uint64_t master, std::size_t i,
                       bool couple, bool with_prophet) {
  TrialStreams st = trial_streams(master, i);
  const Realization r = realize(inst, st.realization);
  auto policy = factory(st.policy());
  TrialOutcome out;
  out.alg = run_episode(inst, r, *policy, st.coin).welfare;
  if (with_prophet) {
    if (couple) {
      out.pro = prophet_offline(r).welfare;
    } else {
      Rng other = make_rng(derive_seed(derive_seed(master, i), 3));
      out.pro = prophet_offline(realize(inst, other)).welfare;
    }
  }
  return out;
}

MonteCarloResult reduce(const std::vector<TrialOutcome>& outs) {
  std::vector<double> a(outs.size()), p(outs.size());
  for (std::size_t i = 0; i < outs.size(); ++i) {
    a[i] = outs[i].alg;
    p[i] = outs[i].pro;
  }
  MonteCarloResult res;
  res.alg = summarize(a);
  res.pro = summarize(p);
  res.ratio = res.alg.mean > 0.0 ? res.pro.mean / res.alg.mean : kInf;
  res.ratio_std_error = ratio_stderr(p, a);
  return res;
}

}  // namespace

MonteCarloResult monte_carlo(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                             std::uint64_t master_seed, bool couple_prophet, const ExecOptions& ex) {
  if (trials < 2) throw std::invalid_argument("monte_carlo needs at least two trials");
  inst.validate();
  auto outs = run_trials<TrialOutcome>(trials, ex, [&](std::size_t i) {
    return one_trial(inst, factory, master_seed, i, couple_prophet, true);
  });
  return reduce(outs);
}

MonteCarloResult monte_carlo_serial(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                                    std::uint64_t master_seed, bool couple_prophet) {
  if (trials < 2) throw std::invalid_argument("monte_carlo needs at least two trials");
  inst.validate();
  std::vector<TrialOutcome> outs(trials);
  for (std::size_t i = 0; i < trials; ++i) outs[i] = one_trial(inst, factory, master_seed, i, couple_prophet, true);
  return reduce(outs);
}

WelfareEstimate estimate_policy(const Instance& inst, const PolicyFactory& factory, std::size_t trials,
                                std::uint64_t master_seed, const ExecOptions& ex) {
  if (trials < 2) throw std::invalid_argument("estimate_policy needs at least two trials");
  inst.validate();
  auto xs = run_trials<double>(trials, ex, [&](std::size_t i) {
    return one_trial(inst, factory, master_seed, i, true, false).alg;
  });
  return summarize(xs);
}

}  // namespace perish
