#include "perish/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perish {

namespace {

constexpr double kMassTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double truncated_geometric_mean(double q, Step cap) {
  if (q >= 1.0) return static_cast<double>(cap);
  return -std::expm1(static_cast<double>(cap) * std::log1p(-(1.0 - q))) / (1.0 - q);
}

// Continue probability q of the geometric whose cap-truncation has the requested mean.
double solve_truncated_continue(double mean, Step cap) {
  if (mean == 1.0) return 0.0;
  if (mean == static_cast<double>(cap)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (truncated_geometric_mean(mid, cap) < mean) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

HorizonDistribution::HorizonDistribution(HorizonFamily family) : family_(std::move(family)) {
  std::visit(overloaded{
      [&](const Geometric& g) {
        if (!(g.mean >= 1.0) || !std::isfinite(g.mean)) throw DistributionError("geometric mean must be >= 1");
        continue_ = 1.0 - 1.0 / g.mean;
        mean_ = g.mean;
      },
      [&](const Deterministic& d) {
        if (d.n < 1) throw DistributionError("deterministic horizon must be >= 1");
        mean_ = static_cast<double>(d.n);
        support_max_ = d.n;
      },
      [&](const UniformRange& u) {
        if (u.lo < 1 || u.hi < u.lo) throw DistributionError("uniform range needs 1 <= lo <= hi");
        mean_ = 0.5 * static_cast<double>(u.lo + u.hi);
        support_max_ = u.hi;
      },
      [&](const ExplicitPmf& p) {
        if (p.probabilities.empty()) throw DistributionError("empty pmf");
        std::vector<std::pair<Step, double>> pts = p.probabilities;
        std::sort(pts.begin(), pts.end());
        double total = 0.0;
        for (const auto& [t, w] : pts) {
          if (t < 1) throw DistributionError("pmf support must be positive");
          if (!(w >= 0.0)) throw DistributionError("pmf masses must be nonnegative");
          if (!support_.empty() && support_.back() == t) {
            masses_.back() += w;
          } else {
            support_.push_back(t);
            masses_.push_back(w);
          }
          total += w;
        }
        if (std::abs(total - 1.0) > kMassTol) throw DistributionError("pmf masses must sum to 1");
        tails_.assign(support_.size() + 1, 0.0);
        mean_ = 0.0;
        for (std::size_t j = support_.size(); j-- > 0;) {
          tails_[j] = tails_[j + 1] + masses_[j];
          mean_ += static_cast<double>(support_[j]) * masses_[j];
        }
        support_max_ = support_.back();
        for (std::size_t j = support_.size(); j-- > 0;) {
          if (masses_[j] > 0.0) { support_max_ = support_[j]; break; }
        }
      },
      [&](const TruncatedGeometric& g) {
        if (g.cap < 1) throw DistributionError("truncation cap must be >= 1");
        if (!(g.mean >= 1.0) || g.mean > static_cast<double>(g.cap))
          throw DistributionError("truncated geometric mean must lie in [1, cap]");
        continue_ = solve_truncated_continue(g.mean, g.cap);
        mean_ = truncated_geometric_mean(continue_, g.cap);
        support_max_ = g.cap;
      },
  }, family_);
}

double HorizonDistribution::survival(Step t) const {
  if (t <= 1) return 1.0;
  return std::visit(overloaded{
      [&](const Geometric&) { return std::pow(continue_, static_cast<double>(t - 1)); },
      [&](const Deterministic& d) { return t <= d.n ? 1.0 : 0.0; },
      [&](const UniformRange& u) {
        if (t <= u.lo) return 1.0;
        if (t > u.hi) return 0.0;
        return static_cast<double>(u.hi - t + 1) / static_cast<double>(u.hi - u.lo + 1);
      },
      [&](const ExplicitPmf&) {
        const auto it = std::lower_bound(support_.begin(), support_.end(), t);
        return tails_[static_cast<std::size_t>(it - support_.begin())];
      },
      [&](const TruncatedGeometric& g) {
        if (t > g.cap) return 0.0;
        return std::pow(continue_, static_cast<double>(t - 1));
      },
  }, family_);
}

double HorizonDistribution::pmf(Step t) const {
  if (t < 1) return 0.0;
  if (const auto* p = std::get_if<ExplicitPmf>(&family_)) {
    (void)p;
    const auto it = std::lower_bound(support_.begin(), support_.end(), t);
    if (it == support_.end() || *it != t) return 0.0;
    return masses_[static_cast<std::size_t>(it - support_.begin())];
  }
  if (is_geometric()) return std::pow(continue_, static_cast<double>(t - 1)) * (1.0 - continue_);
  return survival(t) - survival(t + 1);
}

double HorizonDistribution::hazard_continue(Step t) const {
  const double s = survival(t);
  if (!(s > 0.0)) throw DistributionError("hazard undefined: survival is zero at t=" + std::to_string(t));
  if (is_geometric()) return continue_;
  return survival(t + 1) / s;
}

Step HorizonDistribution::sample(Rng& rng) const {
  return std::visit(overloaded{
      [&](const Geometric&) -> Step { return sample_geometric_trials(rng, 1.0 - continue_); },
      [&](const Deterministic& d) -> Step { return d.n; },
      [&](const UniformRange& u) -> Step {
        return std::uniform_int_distribution<Step>(u.lo, u.hi)(rng);
      },
      [&](const ExplicitPmf&) -> Step {
        // Smallest support point whose strict upper tail falls below u.
        const double u = uniform_open0(rng);
        std::size_t j = 0;
        while (j + 1 < support_.size() && tails_[j + 1] >= u) ++j;
        return support_[j];
      },
      [&](const TruncatedGeometric& g) -> Step {
        return std::min(g.cap, sample_geometric_trials(rng, 1.0 - continue_));
      },
  }, family_);
}

std::string HorizonDistribution::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(overloaded{
      [&](const Geometric& g) { os << "geometric(mean=" << g.mean << ")"; },
      [&](const Deterministic& d) { os << "deterministic(n=" << d.n << ")"; },
      [&](const UniformRange& u) { os << "uniform(lo=" << u.lo << ",hi=" << u.hi << ")"; },
      [&](const ExplicitPmf&) {
        os << "pmf(";
        for (std::size_t j = 0; j < support_.size(); ++j) os << (j ? "," : "") << support_[j] << ":" << masses_[j];
        os << ")";
      },
      [&](const TruncatedGeometric& g) { os << "truncated_geometric(mean=" << g.mean << ",cap=" << g.cap << ")"; },
  }, family_);
  return os.str();
}

bool is_mhr(const HorizonDistribution& d, Step cap) {
  if (d.is_geometric()) return true;
  Step last = cap;
  if (d.support_max()) last = std::min(last, *d.support_max());
  for (Step t = 1; t < last; ++t) {
    if (!(d.survival(t + 1) > 0.0)) break;
    if (d.hazard_continue(t + 1) > d.hazard_continue(t) + 1e-12) return false;
  }
  return true;
}

SosdReport sosd_vs_geometric(const HorizonDistribution& d, Step c_max) {
  // E[max(0, c - X)] = sum_{j<c} Pr[X <= j] for integer X >= 1.
  const double q = 1.0 - 1.0 / d.mean();
  double lhs = 0.0, rhs = 0.0;
  for (Step c = 1; c <= c_max; ++c) {
    if (c >= 2) {
      const Step j = c - 1;
      lhs += 1.0 - d.survival(j + 1);
      rhs += 1.0 - std::pow(q, static_cast<double>(j));
    }
    if (lhs > rhs + 1e-10 * static_cast<double>(c)) return {false, c};
  }
  return {};
}

// ---------------------------------------------------------------------------

ValueDistribution::ValueDistribution(ValueFamily family) : family_(std::move(family)) {
  if (auto* d = std::get_if<DiscreteAtoms>(&family_)) {
    auto& atoms = d->atoms;
    if (atoms.empty()) throw DistributionError("value distribution needs at least one atom");
    double total = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (!(atoms[j].first >= 0.0) || !std::isfinite(atoms[j].first)) throw DistributionError("values must be finite and nonnegative");
      if (!(atoms[j].second >= 0.0)) throw DistributionError("value masses must be nonnegative");
      if (j > 0 && !(atoms[j].first > atoms[j - 1].first)) throw DistributionError("atoms must be strictly increasing");
      total += atoms[j].second;
    }
    if (std::abs(total - 1.0) > kMassTol) throw DistributionError("value masses must sum to 1");
    tails_.assign(atoms.size() + 1, 0.0);
    mean_ = 0.0;
    for (std::size_t j = atoms.size(); j-- > 0;) {
      tails_[j] = tails_[j + 1] + atoms[j].second;
      mean_ += atoms[j].first * atoms[j].second;
    }
  } else {
    const auto& p = std::get<Pareto>(family_);
    if (!(p.alpha > 1.0)) throw DistributionError("pareto alpha must exceed 1");
    if (!(p.cap >= 1.0)) throw DistributionError("pareto cap must be >= 1");
    mean_ = partial_exp_accepted(ThresholdRule::accept_all());
  }
}

const std::vector<std::pair<double, double>>& ValueDistribution::atoms() const {
  return std::get<DiscreteAtoms>(family_).atoms;
}

double ValueDistribution::tail_ge(double x) const {
  if (is_discrete()) {
    const auto& a = atoms();
    const auto it = std::lower_bound(a.begin(), a.end(), x, [](const auto& at, double v) { return at.first < v; });
    return tails_[static_cast<std::size_t>(it - a.begin())];
  }
  const auto& p = pareto();
  if (x <= 1.0) return 1.0;
  if (x > p.cap) return 0.0;
  return std::pow(x, -p.alpha);
}

double ValueDistribution::tail_gt(double x) const {
  if (is_discrete()) {
    const auto& a = atoms();
    const auto it = std::upper_bound(a.begin(), a.end(), x, [](double v, const auto& at) { return v < at.first; });
    return tails_[static_cast<std::size_t>(it - a.begin())];
  }
  const auto& p = pareto();
  if (x < 1.0) return 1.0;
  if (x >= p.cap) return 0.0;
  return std::pow(x, -p.alpha);
}

double ValueDistribution::from_upper_uniform(double u) const {
  if (is_discrete()) {
    // Smallest atom a_j with Pr[v > a_j] < u; tails_[j+1] is decreasing in j.
    const auto& a = atoms();
    std::size_t lo = 0, hi = a.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (tails_[mid + 1] < u) hi = mid; else lo = mid + 1;
    }
    return a[lo].first;
  }
  const auto& p = pareto();
  const double v = std::pow(u, -1.0 / p.alpha);
  return std::min(v, p.cap);
}

double ValueDistribution::partial_exp_accepted(const ThresholdRule& rule) const {
  if (is_discrete()) {
    double s = 0.0;
    for (const auto& [value, mass] : atoms()) {
      if (value > rule.price) s += value * mass;
      else if (value == rule.price) s += value * mass * rule.accept_prob_at_price;
    }
    return s;
  }
  const auto& p = pareto();
  const double x = rule.price;
  if (x > p.cap) return 0.0;
  const double cap_tail = std::pow(p.cap, -p.alpha);
  if (x == p.cap) return p.cap * cap_tail * rule.accept_prob_at_price;
  const double lo = std::max(x, 1.0);
  const double lo_pow = std::pow(lo, 1.0 - p.alpha);
  const double cap_pow = std::pow(p.cap, 1.0 - p.alpha);
  return lo_pow + (lo_pow - cap_pow) / (p.alpha - 1.0);
}

double ValueDistribution::truncation_bias_bound() const {
  if (is_discrete()) return 0.0;
  const auto& p = pareto();
  return std::pow(p.cap, 1.0 - p.alpha) * p.alpha / (p.alpha - 1.0);
}

std::string ValueDistribution::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (is_discrete()) {
    os << "atoms(";
    bool first = true;
    for (const auto& [v, w] : atoms()) {
      os << (first ? "" : ",") << v << ":" << w;
      first = false;
    }
    os << ")";
  } else {
    os << "pareto(alpha=" << pareto().alpha << ",cap=" << pareto().cap << ")";
  }
  return os.str();
}

ValueDistribution uniform_int_values(int lo, int hi) {
  if (hi < lo) throw DistributionError("uniform values need lo <= hi");
  DiscreteAtoms d;
  const double w = 1.0 / static_cast<double>(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) d.atoms.emplace_back(static_cast<double>(k), w);
  return ValueDistribution(std::move(d));
}

ValueDistribution point_mass(double v) {
  return ValueDistribution(DiscreteAtoms{{{v, 1.0}}});
}

namespace {

double acceptance_prob(const ValueDistribution& v, const ThresholdRule& rule) {
  return v.tail_gt(rule.price) + (v.tail_ge(rule.price) - v.tail_gt(rule.price)) * rule.accept_prob_at_price;
}

}  // namespace

ThresholdRule threshold_for_acceptance(const ValueDistribution& v, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DistributionError("acceptance probability must lie in [0,1]");
  if (q == 0.0) return ThresholdRule::reject_all();
  if (q == 1.0) return ThresholdRule::accept_all();
  if (v.is_discrete()) {
    const auto& a = v.atoms();
    std::size_t j = a.size();
    while (j-- > 0) {
      if (v.tail_ge(a[j].first) >= q - 1e-12) break;
    }
    const double above = v.tail_gt(a[j].first);
    const double mass = a[j].second;
    double frac = mass > 0.0 ? (q - above) / mass : 1.0;
    frac = std::clamp(frac, 0.0, 1.0);
    return {a[j].first, frac, q};
  }
  const auto& p = v.pareto();
  const double cap_tail = std::pow(p.cap, -p.alpha);
  if (q > cap_tail) return {std::pow(q, -1.0 / p.alpha), 1.0, q};
  return {p.cap, q / cap_tail, q};
}

ThresholdRule price_rule(const ValueDistribution& v, double price) {
  return {price, 1.0, v.tail_ge(price)};
}

double cond_exp_accepted(const ValueDistribution& v, const ThresholdRule& rule) {
  const double q = acceptance_prob(v, rule);
  if (!(q > 0.0)) throw DistributionError("conditional expectation on a zero-probability acceptance event");
  return v.partial_exp_accepted(rule) / q;
}

double cond_exp_rejected(const ValueDistribution& v, const ThresholdRule& rule) {
  const double q = acceptance_prob(v, rule);
  if (!(q < 1.0)) throw DistributionError("conditional expectation on a zero-probability rejection event");
  return (v.mean() - v.partial_exp_accepted(rule)) / (1.0 - q);
}

Step sample_horizon(const HorizonDistribution& d, Rng& rng) { return d.sample(rng); }
double sample_value(const ValueDistribution& v, Rng& rng) { return v.sample(rng); }

ValueProcess ValueProcess::make_per_step(std::vector<ValueDistribution> vs) {
  if (vs.empty()) throw DistributionError("per-step value list must be non-empty");
  return {std::nullopt, std::move(vs)};
}

const ValueDistribution& ValueProcess::at(Step step) const {
  static const ValueDistribution kNoBuyer = point_mass(0.0);
  if (iid) return *iid;
  if (step >= 1 && static_cast<std::size_t>(step) <= per_step.size()) return per_step[static_cast<std::size_t>(step - 1)];
  return kNoBuyer;
}

}  // namespace perish
