#include "perish/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace perish {

double pro_single_upper(const ValueDistribution& v, double mu) {
  if (!(mu >= 1.0)) throw std::invalid_argument("mean horizon must be >= 1");
  return cond_exp_accepted(v, threshold_for_acceptance(v, 1.0 / mu));
}

double single_mhr_ratio(const HorizonDistribution& d) {
  const double mu = d.mean();
  const double q = 1.0 - 1.0 / mu;
  double e_pow = 0.0;  // E[q^h]
  if (d.is_geometric()) {
    const double s = 1.0 / mu;
    e_pow = s * q / (1.0 - (1.0 - s) * q);
  } else {
    const Step n = *d.support_max();
    double qt = 1.0;
    for (Step t = 1; t <= n; ++t) {
      qt *= q;
      e_pow += d.pmf(t) * qt;
    }
  }
  return 1.0 / (1.0 - e_pow);
}

std::vector<double> pro_stage_upper(const StagePlan& plan, std::size_t m, const ValueDistribution& v) {
  if (m != plan.m) throw std::invalid_argument("stage plan built for a different item count");
  std::vector<double> out;
  for (std::size_t k = 1; k <= plan.stages.size(); ++k) {
    const double len = static_cast<double>(plan.stages[k - 1].length());
    if (len <= 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double budget = plan.budget(static_cast<int>(k));
    const auto rule = threshold_for_acceptance(v, std::min(1.0, budget / len));
    out.push_back(std::min(len, budget) * cond_exp_accepted(v, rule));
  }
  return out;
}

double pro_final_upper(const Instance& inst, const StagePlan& plan) {
  if (!inst.values.is_iid()) throw std::invalid_argument("final-stage bound requires IID values");
  double total = 0.0;
  for (const auto& h : inst.horizons) {
    const double surv = h.survival(plan.final_start);
    if (surv > 0.0) total += surv * pro_single_upper(*inst.values.iid, h.mean());
  }
  return total;
}

StageBound stage_bound(const Instance& inst, const StagePlan& plan) {
  StageBound b;
  b.per_stage = pro_stage_upper(plan, inst.m(), *inst.values.iid);
  b.final_bound = pro_final_upper(inst, plan);
  b.total = b.final_bound;
  for (double x : b.per_stage) b.total += x;
  return b;
}

double pro_prime_upper_geometric(std::size_t m, double lambda, const ValueDistribution& v) {
  if (!(lambda > 0.0 && lambda <= 1.0) || static_cast<double>(m) * lambda > 1.0 + 1e-12)
    throw std::invalid_argument("needs 0 < lambda and m * lambda <= 1");
  double total = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double q = std::min(1.0, static_cast<double>(k) * lambda);
    total += cond_exp_accepted(v, threshold_for_acceptance(v, q));
  }
  return total;
}

double alg_prime_pareto(std::size_t m, double lambda, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  if (!(lambda > 0.0) || static_cast<double>(m) * lambda > 1.0 + 1e-12)
    throw std::invalid_argument("needs 0 < lambda and m * lambda <= 1");
  const double c = std::pow(alpha - 1.0, -1.0 / alpha);
  double total = 0.0;
  for (std::size_t k = 1; k <= m; ++k) total += std::pow(static_cast<double>(k) * lambda, -1.0 / alpha) * c;
  return total;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int min_depth;

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= min_depth && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureError("adaptive quadrature did not converge");
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  Simpson s{f, max_depth - 4};
  return s.step(a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Integral over [a, inf) of R(v^-alpha) v^-alpha dv via v = a w^{-1/(alpha-1)}, which maps it to
// a^{1-alpha}/(alpha-1) times the integral of R(a^-alpha w^{alpha/(alpha-1)}) over w in [0, 1].
double integrate_power_tail(const std::function<double(double)>& R, double a, double alpha, double tol) {
  const double scale = std::pow(a, 1.0 - alpha) / (alpha - 1.0);
  const double a_pow = std::pow(a, -alpha);
  const double e = alpha / (alpha - 1.0);
  std::function<double(double)> h = [&](double w) { return R(a_pow * std::pow(w, e)); };
  return scale * integrate(h, 0.0, 1.0, tol / scale);
}

double pro_prime_finite_m_lb(std::size_t m, double lambda, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  constexpr double kTol = 1e-8;
  double total = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double a = static_cast<double>(k) * lambda;
    if (a >= 1.0) {
      total += 1.0;
      continue;
    }
    const double knee = std::pow(a, -1.0 / alpha);
    std::function<double(double)> body = [&](double v) {
      const double y = std::pow(v, -alpha);
      return (1.0 - a) * y / (y + a - a * y);
    };
    std::function<double(double)> tail = [&](double y) { return (1.0 - a) / (y + a - a * y); };
    total += 1.0 + integrate(body, 1.0, knee, 0.5 * kTol) + integrate_power_tail(tail, knee, alpha, 0.5 * kTol);
  }
  return total;
}

RatioLimits ratio_lb_alpha(double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  const double pa = std::numbers::pi / alpha;
  const double root = std::pow(alpha - 1.0, 1.0 / alpha);
  return {pa / std::sin(pa) * root, alpha / (alpha - 1.0) * root};
}

// ---------------------------------------------------------------------------
// Walk

double walk_reach_prob(int j, double x) {
  if (j <= 0) return 0.0;
  const std::size_t cap = static_cast<std::size_t>(j) + 1;
  std::vector<double> cur(cap + 1, 0.0), nxt(cap + 1, 0.0);
  cur[1] = 1.0;
  double hit = 0.0;
  for (int step = 0; step < j; ++step) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t pos = 1; pos <= cap; ++pos) {
      const double p = cur[pos];
      if (p == 0.0) continue;
      if (pos == 1) hit += p * x; else nxt[pos - 1] += p * x;
      nxt[std::min(pos + 1, cap)] += p * (1.0 - x);
    }
    cur.swap(nxt);
  }
  return hit;
}

double walk_limit(double x) {
  if (x >= 1.0) return 1.0;
  return std::min(1.0, x / (1.0 - x));
}

std::vector<double> walk_grid(int points) {
  if (points < 10) throw std::invalid_argument("walk grid needs at least 10 points");
  const int n_log = points / 10;
  const int n_lin = points - n_log;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(points));
  const double lo = std::log(1e-8), hi = std::log(1.0 / n_lin);
  for (int i = 0; i < n_log; ++i) xs.push_back(std::exp(lo + (hi - lo) * i / n_log));
  for (int i = 1; i <= n_lin; ++i) xs.push_back(static_cast<double>(i) / n_lin);
  return xs;
}

double walk_uniform_gap(int j, int grid) {
  if (j < 1) throw std::invalid_argument("walk gap needs j >= 1");
  double gap = 0.0;
  for (double x : walk_grid(grid)) gap = std::max(gap, 1.0 - walk_reach_prob(j, x) / walk_limit(x));
  return gap;
}

double pro_prime_walk_lb(std::size_t m, double lambda, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  const int j = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
  constexpr double kTol = 1e-8;
  double total = 0.0;
  for (std::size_t k = 1; k + static_cast<std::size_t>(j) <= m; ++k) {
    const double c = static_cast<double>(k + static_cast<std::size_t>(j)) * lambda;
    // Values below 1 are always cleared, so the integrand is constant on [0, 1].
    double term = walk_reach_prob(j, 1.0 / (1.0 + c));
    const double knee = std::max(1.0, std::pow(c, -1.0 / alpha));
    std::function<double(double)> body = [&](double v) {
      const double y = std::pow(v, -alpha);
      return walk_reach_prob(j, y / (y + c));
    };
    std::function<double(double)> tail = [&](double y) {
      const double x = y / (y + c);
      const double ratio = x > 0.0 ? walk_reach_prob(j, x) / x : 1.0;
      return ratio / (y + c);
    };
    term += integrate(body, 1.0, knee, 0.5 * kTol) + integrate_power_tail(tail, knee, alpha, 0.5 * kTol);
    total += term;
  }
  return total;
}

}  // namespace perish
