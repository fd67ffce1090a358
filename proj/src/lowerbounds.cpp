#include "perish/lowerbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace perish {

const Quantity& LowerBoundReport::get(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return q;
  throw std::out_of_range("report " + construction + " has no quantity " + name);
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

Instance gen_pareto_geometric(std::size_t m, double lambda, double alpha, double cap) {
  if (m == 0) throw std::invalid_argument("need at least one item");
  if (!(alpha > 1.0)) throw std::invalid_argument("Pareto shape must exceed 1");
  if (!(lambda > 0.0) || static_cast<double>(m) * lambda > 1.0 + 1e-12)
    throw std::invalid_argument("need 0 < lambda and m * lambda <= 1");
  return make_iid_instance(m, Geometric{1.0 / lambda}, Pareto{alpha, cap});
}

LowerBoundReport eval_low_rate_geometric(std::size_t m, double lambda, double alpha, std::size_t trials,
                                         std::uint64_t seed, const ExecOptions& ex) {
  const Instance inst = gen_pareto_geometric(m, lambda, alpha);
  LowerBoundReport rep;
  rep.construction = "low-rate-geometric";
  rep.parameters = {{"m", std::to_string(m)}, {"lambda", fmt(lambda)}, {"alpha", fmt(alpha)}};

  const WelfareEstimate pro = estimate_pro(inst, trials, seed, ex, ProphetMode::Sampled);
  const double alg = alg_prime_pareto(m, lambda, alpha);
  const RatioLimits lim = ratio_lb_alpha(alpha);
  rep.add("pro", pro);
  rep.add("alg_prime", alg);
  rep.add("pro_prime_finite_m_lb", pro_prime_finite_m_lb(m, lambda, alpha));
  rep.add("pro_prime_walk_lb", pro_prime_walk_lb(m, lambda, alpha));
  rep.add("pro_prime_upper", pro_prime_upper_geometric(m, lambda, *inst.values.iid));
  rep.add("truncation_bias", inst.values.iid->truncation_bias_bound());
  rep.add("ratio_limit_finite_m", lim.finite_m);
  rep.add("ratio_limit_large_m", lim.large_m);
  rep.quantities.push_back({"ratio", pro.mean / alg, pro.std_error / alg, true});
  rep.gap = pro.mean / alg;
  return rep;
}

// ---------------------------------------------------------------------------

double loglog_q(std::size_t m) {
  return std::exp(static_cast<double>(m) * std::log1p(-1.0 / static_cast<double>(m)));
}

namespace {

int checked_log2(std::size_t m) {
  if (m < 32 || (m & (m - 1)) != 0) throw std::invalid_argument("m must be a power of two, at least 32");
  int l = 0;
  while ((std::size_t{1} << l) < m) ++l;
  return l;
}

}  // namespace

Instance gen_loglog(std::size_t m) {
  const int L = checked_log2(m);
  const double q = loglog_q(m);
  std::vector<std::pair<double, double>> atoms;
  // Tail at value 1/(q^t t^2) is q^t; values increase with t since q t^2 / (t+1)^2 < 1.
  atoms.emplace_back(0.0, 1.0 - std::pow(q, 3));
  for (int t = 3; t <= L; ++t) {
    const double tail = std::pow(q, t);
    const double next = t < L ? std::pow(q, t + 1) : 0.0;
    atoms.emplace_back(1.0 / (tail * t * t), tail - next);
  }
  return make_iid_instance(m, Geometric{static_cast<double>(m)}, DiscreteAtoms{atoms});
}

double loglog_sing_bound(std::size_t m, const ValueDistribution& v, double threshold) {
  const ThresholdRule rule = price_rule(v, threshold);
  const double tau = rule.target_accept_prob;
  if (tau <= 0.0) return 0.0;
  const double q = loglog_q(m);
  const double md = static_cast<double>(m);
  // Epoch j spans m steps; at most m*tau acceptances and m*q^j surviving items in expectation.
  double sum = 0.0;
  double qj = 1.0;
  for (int j = 0; j < 100000; ++j) {
    const double term = std::min(md * tau, md * qj);
    sum += term;
    if (md * qj < md * tau && md * qj < 1e-15 * sum) break;
    qj *= q;
  }
  return sum * cond_exp_accepted(v, rule);
}

namespace {

// Leftmost index whose key is >= t, with point removal.
class LeftmostAtLeast {
 public:
  explicit LeftmostAtLeast(const std::vector<Step>& keys) {
    n_ = 1;
    while (n_ < keys.size()) n_ <<= 1;
    tree_.assign(2 * n_, std::numeric_limits<Step>::min());
    for (std::size_t i = 0; i < keys.size(); ++i) tree_[n_ + i] = keys[i];
    for (std::size_t i = n_ - 1; i >= 1; --i) tree_[i] = std::max(tree_[2 * i], tree_[2 * i + 1]);
  }
  std::optional<std::size_t> find(Step t) const {
    if (tree_[1] < t) return std::nullopt;
    std::size_t i = 1;
    while (i < n_) i = tree_[2 * i] >= t ? 2 * i : 2 * i + 1;
    return i - n_;
  }
  void erase(std::size_t idx) {
    std::size_t i = n_ + idx;
    tree_[i] = std::numeric_limits<Step>::min();
    for (i >>= 1; i >= 1; i >>= 1) tree_[i] = std::max(tree_[2 * i], tree_[2 * i + 1]);
  }

 private:
  std::size_t n_;
  std::vector<Step> tree_;
};

}  // namespace

double fixed_price_episode_fast(const std::vector<Step>& horizons, const ValueDistribution& v,
                                const ThresholdRule& rule, Rng& rng) {
  const double tau = rule.target_accept_prob;
  if (tau <= 0.0 || horizons.empty()) return 0.0;
  LeftmostAtLeast alive(horizons);
  double welfare = 0.0;
  Step t = 0;
  for (;;) {
    t += tau >= 1.0 ? 1 : sample_geometric_trials(rng, tau);
    const auto i = alive.find(t);
    if (!i) break;
    alive.erase(*i);
    welfare += v.from_upper_uniform(tau * uniform_open0(rng));
  }
  return welfare;
}

WelfareEstimate estimate_fixed_price_fast(const Instance& inst, const ThresholdRule& rule, std::size_t trials,
                                          std::uint64_t seed, const ExecOptions& ex) {
  if (!inst.values.is_iid()) throw std::invalid_argument("fast fixed-price kernel requires IID values");
  if (trials < 2) throw std::invalid_argument("need at least two trials");
  const ValueDistribution& v = *inst.values.iid;
  auto xs = run_trials<double>(trials, ex, [&](std::size_t i) {
    TrialStreams st = trial_streams(seed, i);
    const std::vector<Step> hs = sample_horizons(inst, st.realization);
    return fixed_price_episode_fast(hs, v, rule, st.coin);
  });
  return summarize(xs);
}

LowerBoundReport eval_loglog(std::size_t m, std::size_t trials, std::uint64_t seed, const ExecOptions& ex) {
  const Instance inst = gen_loglog(m);
  const ValueDistribution& v = *inst.values.iid;
  LowerBoundReport rep;
  rep.construction = "loglog";
  rep.parameters = {{"m", std::to_string(m)}, {"q_m", fmt(loglog_q(m))}};

  WelfareEstimate best;
  double best_threshold = 0.0;
  double sing_bound = 0.0;
  const auto& atoms = v.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double a = atoms[j].first;
    const WelfareEstimate w =
        estimate_fixed_price_fast(inst, price_rule(v, a), trials, derive_seed(seed, 100 + j), ex);
    const double bound = loglog_sing_bound(m, v, a);
    rep.add("welfare@" + fmt(a), w);
    rep.add("sing_bound@" + fmt(a), bound);
    sing_bound = std::max(sing_bound, bound);
    if (j == 0 || w.mean > best.mean) {
      best = w;
      best_threshold = a;
    }
  }
  const WelfareEstimate pro = estimate_pro(inst, trials, derive_seed(seed, 1), ex, ProphetMode::Sampled);
  rep.add("best_threshold", best_threshold);
  rep.add("best_sing", best);
  rep.add("sing_bound", sing_bound);
  rep.add("pro", pro);
  const double ratio = pro.mean / best.mean;
  const double rel = std::hypot(pro.std_error / pro.mean, best.std_error / best.mean);
  rep.quantities.push_back({"ratio", ratio, ratio * rel, true});
  rep.gap = ratio;
  return rep;
}

// ---------------------------------------------------------------------------

GeneralHorizon gen_general_horizon(int c) {
  if (c < 1) throw std::invalid_argument("c must be at least 1");
  if (c > 4 || c * (1 << c) > 30) throw std::invalid_argument("c * 2^c must not exceed 30");
  GeneralHorizon g;
  g.c = c;
  g.k = 1 << c;
  const int ck = c * g.k;
  g.n = Step{1} << ck;
  std::vector<std::pair<Step, double>> hp;
  for (int i = 0; i <= g.k; ++i) {
    g.checkpoints.push_back(Step{1} << (c * i));
    g.pi.push_back(i < g.k ? std::ldexp(1.0, -i - 1) : std::ldexp(1.0, -g.k));
    hp.emplace_back(g.checkpoints.back(), g.pi.back());
  }
  std::vector<std::pair<double, double>> atoms;
  for (int i = 1; i <= ck; ++i)
    atoms.emplace_back(std::exp2(static_cast<double>(i) / c), i < ck ? std::ldexp(1.0, -i) : std::ldexp(1.0, -ck + 1));
  g.instance = make_iid_instance(1, ExplicitPmf{hp}, DiscreteAtoms{atoms}, g.n);
  return g;
}

double sample_max_of(const ValueDistribution& v, double count, Rng& rng) {
  // The minimum of `count` upper uniforms is 1 - U^{1/count}.
  const double u = -std::expm1(std::log(uniform_open0(rng)) / count);
  return v.from_upper_uniform(u > 0.0 ? u : std::numeric_limits<double>::denorm_min());
}

namespace {

// Pr[max of n draws <= atom j], for every atom.
std::vector<double> max_cdf(const ValueDistribution& v, double n) {
  std::vector<double> out;
  for (const auto& atom : v.atoms()) out.push_back(std::exp(n * std::log1p(-v.tail_gt(atom.first))));
  out.back() = 1.0;
  return out;
}

// Block b covers values (checkpoints[b-1], checkpoints[b]]; block 0 is the first value.
double block_length(const GeneralHorizon& g, std::size_t b) {
  return static_cast<double>(b == 0 ? g.checkpoints[0] : g.checkpoints[b] - g.checkpoints[b - 1]);
}

}  // namespace

double general_horizon_pro_exact(const GeneralHorizon& g) {
  const ValueDistribution& v = *g.instance.values.iid;
  const auto& atoms = v.atoms();
  double pro = 0.0;
  for (std::size_t i = 0; i < g.checkpoints.size(); ++i) {
    const auto F = max_cdf(v, static_cast<double>(g.checkpoints[i]));
    double e = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) e += atoms[j].first * (F[j] - (j ? F[j - 1] : 0.0));
    pro += g.pi[i] * e;
  }
  return pro;
}

double general_horizon_vpro_exact(const GeneralHorizon& g) {
  const ValueDistribution& v = *g.instance.values.iid;
  const auto& atoms = v.atoms();
  const std::size_t A = atoms.size();
  std::vector<double> reach(g.pi.size());
  double acc = 0.0;
  for (std::size_t i = g.pi.size(); i-- > 0;) reach[i] = (acc += g.pi[i]);

  // State: (atom index of the running max, best aimed value so far).
  std::map<std::pair<std::size_t, double>, double> cur;
  cur[{0, 0.0}] = 1.0;
  bool first = true;
  for (std::size_t b = 0; b < g.checkpoints.size(); ++b) {
    const auto F = max_cdf(v, block_length(g, b));
    std::map<std::pair<std::size_t, double>, double> next;
    for (const auto& [state, p] : cur) {
      const auto [lo, best] = state;
      for (std::size_t j = 0; j < A; ++j) {
        const double pj = F[j] - (j ? F[j - 1] : 0.0);
        if (pj <= 0.0) continue;
        const std::size_t r = first ? j : std::max(lo, j);
        const double nb = std::max(best, reach[b] * atoms[r].first);
        next[{r, nb}] += p * pj;
      }
    }
    cur = std::move(next);
    first = false;
  }
  double e = 0.0;
  for (const auto& [state, p] : cur) e += p * state.second;
  return e;
}

double general_horizon_vpro_sample(const GeneralHorizon& g, Rng& rng) {
  const ValueDistribution& v = *g.instance.values.iid;
  double running = 0.0;
  double best = 0.0;
  double reach = 1.0;
  for (std::size_t b = 0; b < g.checkpoints.size(); ++b) {
    running = std::max(running, sample_max_of(v, block_length(g, b), rng));
    best = std::max(best, reach * running);
    reach -= g.pi[b];
  }
  return best;
}

double general_horizon_vpro_upper(const GeneralHorizon& g) {
  double sum = 0.0;
  for (int i = 0; i <= g.k; ++i)
    sum += std::exp2(i) * std::min(1.0, 2.0 * (g.k + 1) * std::exp2(-static_cast<double>(g.c) * i));
  return 4.0 * sum;
}

double general_horizon_pro_lower(const GeneralHorizon& g) {
  const ValueDistribution& v = *g.instance.values.iid;
  // Pro >= sum_i (2^i - 2^{i-1}) Pr[best >= 2^i] + Pr[best >= 1], with Pr[best >= x] = sum_j pi_j Pr[M_j >= x].
  double sum = 0.0;
  for (int i = 0; i <= g.k; ++i) {
    const double tail = v.tail_ge(std::exp2(i) * (1.0 - 1e-12));
    double pr = 0.0;
    for (std::size_t j = 0; j < g.checkpoints.size(); ++j)
      pr += g.pi[j] * -std::expm1(static_cast<double>(g.checkpoints[j]) * std::log1p(-std::min(tail, 1.0 - 1e-300)));
    sum += (i == 0 ? 1.0 : std::exp2(i - 1)) * pr;
  }
  return sum;
}

double general_horizon_pro_lower_closed(const GeneralHorizon& g) {
  return 0.5 * (g.k + 1) * (1.0 - std::exp(-1.0));
}

LowerBoundReport eval_general_horizon(int c, std::size_t trials, std::uint64_t seed, const ExecOptions& ex) {
  const GeneralHorizon g = gen_general_horizon(c);
  LowerBoundReport rep;
  rep.construction = "general-horizon";
  rep.parameters = {{"c", std::to_string(c)}, {"k", std::to_string(g.k)}, {"n", std::to_string(g.n)}};

  if (trials < 2) throw std::invalid_argument("need at least two trials");
  auto xs = run_trials<double>(trials, ex, [&](std::size_t i) {
    Rng rng = trial_streams(seed, i).policy;
    return general_horizon_vpro_sample(g, rng);
  });
  const WelfareEstimate vpro = summarize(xs);
  // Long horizons make full realizations memory-heavy; the sampled prophet has the same law.
  const ProphetMode mode = g.n <= (Step{1} << 16) ? ProphetMode::FullRealization : ProphetMode::Sampled;
  const WelfareEstimate pro = estimate_pro(g.instance, trials, derive_seed(seed, 1), ex, mode);
  const double vpro_exact = general_horizon_vpro_exact(g);
  const double pro_exact = general_horizon_pro_exact(g);
  rep.add("vpro", vpro);
  rep.add("vpro_exact", vpro_exact);
  rep.add("vpro_upper", general_horizon_vpro_upper(g));
  rep.add("pro", pro);
  rep.add("pro_exact", pro_exact);
  rep.add("pro_lower", general_horizon_pro_lower(g));
  rep.add("pro_lower_closed", general_horizon_pro_lower_closed(g));
  const double ratio = pro.mean / vpro.mean;
  const double rel = std::hypot(pro.std_error / pro.mean, vpro.std_error / vpro.mean);
  rep.quantities.push_back({"gap", ratio, ratio * rel, true});
  rep.add("gap_exact", pro_exact / vpro_exact);
  rep.gap = ratio;
  return rep;
}

}  // namespace perish
