#include "perish/prophet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

namespace perish {

void Instance::validate() const {
  if (horizons.empty()) throw DistributionError("instance needs at least one item");
  if (time_cap < 1) throw DistributionError("time cap must be positive");
  if (!values.is_iid() && values.per_step.empty()) throw DistributionError("per-step value list is empty");
  for (const auto& h : horizons) {
    if (h.support_max() && *h.support_max() > time_cap)
      throw DistributionError("time cap below a horizon's finite support");
  }
}

Instance make_iid_instance(std::size_t m, const HorizonDistribution& h, const ValueDistribution& v, Step time_cap) {
  Instance inst{std::vector<HorizonDistribution>(m, h), ValueProcess::make_iid(v), time_cap};
  inst.validate();
  return inst;
}

std::vector<Step> sample_horizons(const Instance& inst, Rng& rng) {
  std::vector<Step> hs(inst.m());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    hs[i] = inst.horizons[i].sample(rng);
    if (hs[i] > inst.time_cap) throw CapExceeded("sampled horizon exceeds time cap");
  }
  return hs;
}

Realization realize(const Instance& inst, Rng& rng) {
  Realization r;
  r.horizons = sample_horizons(inst, rng);
  const Step T = *std::max_element(r.horizons.begin(), r.horizons.end());
  r.values.resize(static_cast<std::size_t>(T));
  for (Step t = 1; t <= T; ++t) r.values[static_cast<std::size_t>(t - 1)] = inst.values.at(t).sample(rng);
  return r;
}

void write_trace(std::ostream& os, const Realization& r) {
  for (std::size_t i = 0; i < r.horizons.size(); ++i) os << "item " << i << " horizon " << r.horizons[i] << '\n';
  for (Step t = 1; t <= r.T(); ++t) os << "buyer " << t << " value " << r.value_at(t) << '\n';
}

namespace {

std::vector<std::size_t> items_by_horizon(const std::vector<Step>& hs) {
  std::vector<std::size_t> order(hs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hs[a] < hs[b]; });
  return order;
}

struct Buyer {
  double value;
  Step step;
};
struct BuyerLess {
  // Max-heap on value; among equal values the earliest buyer is on top.
  bool operator()(const Buyer& a, const Buyer& b) const {
    if (a.value != b.value) return a.value < b.value;
    return a.step > b.step;
  }
};

}  // namespace

MatchingResult prophet_offline(const Realization& r) {
  MatchingResult res;
  std::priority_queue<Buyer, std::vector<Buyer>, BuyerLess> pool;
  Step next = 1;
  for (std::size_t i : items_by_horizon(r.horizons)) {
    const Step h = std::min(r.horizons[i], r.T());
    for (; next <= h; ++next) pool.push({r.value_at(next), next});
    if (pool.empty()) continue;
    const Buyer b = pool.top();
    pool.pop();
    res.welfare += b.value;
    res.assignment.push_back({i, b.step, b.value});
  }
  return res;
}

double matching_bruteforce(const Realization& r) {
  const std::size_t m = r.horizons.size();
  if (m > 8 || r.T() > 12) throw std::invalid_argument("brute-force matching limited to m <= 8 and T <= 12");
  // best[mask]: max welfare using exactly the item subset `mask` on the buyers seen so far.
  const std::size_t full = std::size_t{1} << m;
  std::vector<double> best(full, -kInf), next;
  best[0] = 0.0;
  for (Step t = 1; t <= r.T(); ++t) {
    next = best;
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (best[mask] == -kInf) continue;
      for (std::size_t i = 0; i < m; ++i) {
        if ((mask >> i) & 1U) continue;
        if (r.horizons[i] < t) continue;
        const std::size_t to = mask | (std::size_t{1} << i);
        next[to] = std::max(next[to], best[mask] + r.value_at(t));
      }
    }
    best.swap(next);
  }
  return *std::max_element(best.begin(), best.end());
}

double prophet_over_intervals(const std::vector<Step>& sorted_horizons,
                              const std::vector<std::vector<double>>& interval_values) {
  std::priority_queue<double> pool;
  double welfare = 0.0;
  for (std::size_t j = 0; j < sorted_horizons.size(); ++j) {
    for (double v : interval_values[j]) pool.push(v);
    if (pool.empty()) continue;
    welfare += pool.top();
    pool.pop();
  }
  return welfare;
}

double prophet_welfare_sampled(const Instance& inst, Rng& rng) {
  if (!inst.values.is_iid()) throw std::invalid_argument("sampled prophet requires IID values");
  const ValueDistribution& v = *inst.values.iid;
  std::vector<Step> hs = sample_horizons(inst, rng);
  std::sort(hs.begin(), hs.end());
  const std::size_t m = hs.size();
  std::vector<std::vector<double>> tops(m);
  Step prev = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const Step len = hs[j] - prev;
    prev = hs[j];
    const Step k = std::min<Step>(len, static_cast<Step>(m - j));
    // Smallest k of `len` uniforms, generated in increasing order; small u maps to large values.
    double log_s = 0.0;
    tops[j].reserve(static_cast<std::size_t>(k));
    for (Step i = 0; i < k; ++i) {
      log_s += std::log(uniform_open0(rng)) / static_cast<double>(len - i);
      const double u = -std::expm1(log_s);
      tops[j].push_back(v.from_upper_uniform(u > 0.0 ? u : std::numeric_limits<double>::denorm_min()));
    }
  }
  return prophet_over_intervals(hs, tops);
}

WelfareEstimate estimate_pro(const Instance& inst, std::size_t trials, std::uint64_t seed, const ExecOptions& ex,
                             ProphetMode mode) {
  if (trials < 2) throw std::invalid_argument("estimate_pro needs at least two trials");
  inst.validate();
  if (mode == ProphetMode::Auto) mode = inst.values.is_iid() ? ProphetMode::Sampled : ProphetMode::FullRealization;
  auto xs = run_trials<double>(trials, ex, [&](std::size_t i) {
    Rng rng = trial_streams(seed, i).realization;
    if (mode == ProphetMode::Sampled) return prophet_welfare_sampled(inst, rng);
    return prophet_offline(realize(inst, rng)).welfare;
  });
  return summarize(xs);
}

}  // namespace perish
