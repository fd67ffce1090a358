#pragma once

#include <functional>
#include <vector>

#include "perish/stages.hpp"

namespace perish {

struct StageBound {
  std::vector<double> per_stage;
  double final_bound = 0.0;
  double total = 0.0;
};

double pro_single_upper(const ValueDistribution& v, double mu);
double single_mhr_ratio(const HorizonDistribution& d);

std::vector<double> pro_stage_upper(const StagePlan& plan, std::size_t m, const ValueDistribution& v);
double pro_final_upper(const Instance& inst, const StagePlan& plan);
StageBound stage_bound(const Instance& inst, const StagePlan& plan);

double pro_prime_upper_geometric(std::size_t m, double lambda, const ValueDistribution& v);
double alg_prime_pareto(std::size_t m, double lambda, double alpha);
double pro_prime_finite_m_lb(std::size_t m, double lambda, double alpha);

struct RatioLimits {
  double finite_m;
  double large_m;
};
RatioLimits ratio_lb_alpha(double alpha);

double walk_reach_prob(int j, double x);
double walk_limit(double x);
std::vector<double> walk_grid(int points);
double walk_uniform_gap(int j, int grid = 10000);

// Large-m prophet lower bound in the alternative process: items k = 1..m - j each collect the
// expected best value a walk of j steps can reach, with j = floor(sqrt(m)).
double pro_prime_walk_lb(std::size_t m, double lambda, double alpha);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Simpson with Richardson correction on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth = 48);
// Integral over [a, inf) of R(v^-alpha) v^-alpha dv for R bounded near 0.
double integrate_power_tail(const std::function<double(double)>& R, double a, double alpha, double abs_tol);

}  // namespace perish
