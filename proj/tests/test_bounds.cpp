#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "perish/bounds.hpp"

using namespace perish;

namespace {

// Probability that a walk started at 1 (down w.p. x, up otherwise) hits 0 within j steps,
// summed over all 2^j full-length step sequences.
double walk_by_paths(int j, double x) {
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << j); ++mask) {
    int pos = 1;
    double p = 1.0;
    bool hit = false;
    for (int s = 0; s < j; ++s) {
      const bool down = mask >> s & 1u;
      p *= down ? x : 1.0 - x;
      pos += down ? -1 : 1;
      hit = hit || pos == 0;
    }
    if (hit) total += p;
  }
  return total;
}

double ratio_direct(const HorizonDistribution& d) {
  const double mu = d.mean();
  double e = 0.0;
  for (Step t = 1; t <= *d.support_max(); ++t) e += d.pmf(t) * (1.0 - std::pow(1.0 - 1.0 / mu, static_cast<double>(t)));
  return 1.0 / e;
}

}  // namespace

TEST_CASE("pro_single_upper") {
  const ValueDistribution u = uniform_int_values(1, 4);
  CHECK(pro_single_upper(u, 2.0) == doctest::Approx(3.5));
  CHECK(pro_single_upper(u, 1.0) == doctest::Approx(2.5));
  CHECK(pro_single_upper(DiscreteAtoms{{{1, 0.7}, {10, 0.3}}}, 2.0) == doctest::Approx(6.4));
  CHECK(pro_single_upper(u, 4.0) == doctest::Approx(4.0));
}

TEST_CASE("single_mhr_ratio") {
  CHECK(single_mhr_ratio(Geometric{2.0}) == doctest::Approx(1.5));
  CHECK(single_mhr_ratio(Deterministic{2}) == doctest::Approx(4.0 / 3.0));
  CHECK(single_mhr_ratio(Deterministic{1}) == doctest::Approx(1.0));
  for (double mu : {1.0, 1.5, 3.0, 10.0, 250.0}) CHECK(single_mhr_ratio(Geometric{mu}) == doctest::Approx(2.0 - 1.0 / mu));

  Rng rng = make_rng(404);
  for (int rep = 0; rep < 500; ++rep) {
    const HorizonDistribution d = testgen::random_mhr(rng, 80);
    const double r = single_mhr_ratio(d);
    CHECK(r == doctest::Approx(ratio_direct(d)).epsilon(1e-10));
    CHECK(r <= 2.0 - 1.0 / d.mean() + 1e-9);
  }
  for (int n = 1; n <= 30; ++n) CHECK(single_mhr_ratio(UniformRange{1, n}) <= 2.0 - 1.0 / ((n + 1) / 2.0) + 1e-9);
}

TEST_CASE("pro_stage_upper") {
  const ValueDistribution u = uniform_int_values(1, 4);
  StagePlan plan;
  plan.m = 4;
  plan.s = 2;
  plan.stages = {{1, 2, StageKind::Short}, {2, 10, StageKind::Long}};
  plan.final_start = 10;
  const std::vector<double> b = pro_stage_upper(plan, 4, u);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == doctest::Approx(2.5));
  CHECK(b[1] == doctest::Approx(8.0));

  plan.stages = {{1, 3, StageKind::Long}, {3, 4, StageKind::Short}};
  CHECK(pro_stage_upper(plan, 4, u)[0] == doctest::Approx(2 * 2.5));

  const Instance inst = make_iid_instance(40, Geometric{2.0}, u);
  const std::vector<double> g = pro_stage_upper(build_stage_plan(inst), 40, u);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == doctest::Approx(2.5));
  CHECK(g[1] == doctest::Approx(2.5));
}

TEST_CASE("pro_final_upper") {
  const ValueDistribution u = uniform_int_values(1, 4);
  const Instance two{{ExplicitPmf{{{1, 0.6}, {3, 0.2}, {4, 0.2}}}, ExplicitPmf{{{1, 0.9}, {11, 0.1}}}},
                     ValueProcess::make_iid(u)};
  CHECK(two.horizons[0].mean() == doctest::Approx(2.0));
  CHECK(two.horizons[1].mean() == doctest::Approx(2.0));
  StagePlan plan;
  plan.m = 2;
  plan.final_start = 2;
  CHECK(pro_final_upper(two, plan) == doctest::Approx(0.4 * 3.5 + 0.1 * 3.5));

  plan.final_start = 1;
  CHECK(pro_final_upper(two, plan) == doctest::Approx(7.0));
  const Instance det = make_iid_instance(1, Deterministic{3}, u);
  CHECK(pro_final_upper(det, build_stage_plan(det)) == doctest::Approx(pro_single_upper(u, 3.0)));

  const Instance big = make_iid_instance(40, Geometric{2.0}, u);
  const StageBound sb = stage_bound(big, build_stage_plan(big));
  CHECK(sb.total == doctest::Approx(sb.per_stage[0] + sb.per_stage[1] + sb.final_bound));
  CHECK(sb.final_bound == doctest::Approx(40 * 0.25 * pro_single_upper(u, 2.0)));
}

TEST_CASE("low-rate prophet upper bound") {
  CHECK(pro_prime_upper_geometric(2, 0.1, uniform_int_values(1, 10)) == doctest::Approx(19.5));
  CHECK(pro_prime_upper_geometric(1, 1.0, uniform_int_values(1, 10)) == doctest::Approx(5.5));
  for (double alpha : {1.5, 2.0, 3.0})
    for (std::size_t m : {1, 5, 20}) {
      const double lambda = 1e-3;
      double closed = 0.0;
      for (std::size_t k = 1; k <= m; ++k) closed += alpha / (alpha - 1.0) * std::pow(k * lambda, -1.0 / alpha);
      CHECK(pro_prime_upper_geometric(m, lambda, Pareto{alpha, 1e15}) == doctest::Approx(closed).epsilon(1e-4));
    }
}

TEST_CASE("alg_prime_pareto") {
  CHECK(alg_prime_pareto(1, 0.01, 2.0) == doctest::Approx(10.0));
  CHECK(alg_prime_pareto(2, 0.01, 2.0) == doctest::Approx(10.0 + 10.0 / std::sqrt(2.0)));
  CHECK(alg_prime_pareto(3, 0.1, 400.0) == doctest::Approx(3.0).epsilon(0.05));
  CHECK_THROWS(alg_prime_pareto(1, 0.1, 1.0));
}

TEST_CASE("finite-m prophet lower bound") {
  CHECK(pro_prime_finite_m_lb(1, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(pro_prime_finite_m_lb(4, 0.25, 3.0) > 0.0);
  const double v = pro_prime_finite_m_lb(1, 1e-6, 2.0);
  CHECK(std::abs(v / (std::numbers::pi / 2 * 1e3) - 1.0) < 0.005);
  for (double alpha : {1.5, 2.0, 3.0, 5.0})
    for (std::size_t m : {1, 3, 10})
      for (double lambda : {1e-2, 1e-4}) {
        const double lb = pro_prime_finite_m_lb(m, lambda, alpha);
        CHECK(lb <= pro_prime_upper_geometric(m, lambda, Pareto{alpha, 1e15}) + 1e-9);
        CHECK(lb >= alg_prime_pareto(m, lambda, alpha) - 1e-9);
      }
}

TEST_CASE("ratio limits") {
  const RatioLimits r = ratio_lb_alpha(2.0);
  CHECK(std::abs(r.finite_m - std::numbers::pi / 2) < 1e-9);
  CHECK(std::abs(r.large_m - 2.0) < 1e-9);
  double best = 0.0, arg = 0.0;
  for (int i = 0; i <= 890; ++i) {
    const double a = 1.1 + 0.01 * i;
    const double y = ratio_lb_alpha(a).large_m;
    if (y > best) best = y, arg = a;
  }
  CHECK(arg == doctest::Approx(2.0));
}

TEST_CASE("walk reach probabilities") {
  for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(walk_reach_prob(1, x) == doctest::Approx(x));
  CHECK(walk_reach_prob(3, 0.5) == doctest::Approx(0.625));
  CHECK(walk_by_paths(3, 0.5) == doctest::Approx(0.625));
  for (int j = 1; j <= 12; ++j) {
    CHECK(walk_reach_prob(j, 1.0) == doctest::Approx(1.0));
    for (int g = 0; g <= 20; ++g) {
      const double x = g / 20.0;
      CHECK(walk_reach_prob(j, x) == doctest::Approx(walk_by_paths(j, x)).epsilon(1e-12));
      CHECK(walk_reach_prob(j, x) >= x - 1e-15);
      CHECK(walk_reach_prob(j, x) <= walk_limit(x) + 1e-12);
      CHECK(walk_reach_prob(j + 1, x) >= walk_reach_prob(j, x) - 1e-15);
    }
  }
  CHECK(walk_limit(1.0 / 3.0) == doctest::Approx(0.5));
  CHECK(walk_limit(0.5) == 1.0);
  CHECK(walk_limit(0.0) == 0.0);
  CHECK(walk_limit(1.0) == 1.0);
}

TEST_CASE("walk uniform gap") {
  double prev = 1.0;
  for (int j : {1, 2, 5, 10, 50, 100, 200}) {
    const double g = walk_uniform_gap(j, 1000);
    CHECK(g <= prev + 1e-12);
    prev = g;
  }
  CHECK(walk_uniform_gap(200, 1000) < 0.15);
  CHECK(walk_uniform_gap(200, 1000) < walk_uniform_gap(50, 1000));
  const std::vector<double> grid = walk_grid(101);
  CHECK(grid.size() == 101);
  CHECK(grid.back() == 1.0);
  for (double x : grid) CHECK((x > 0.0 && x <= 1.0));
}

TEST_CASE("walk-based lower bound") {
  CHECK(pro_prime_walk_lb(1, 1e-4, 2.0) == 0.0);
  for (std::size_t m : {4, 25, 100})
    CHECK(pro_prime_walk_lb(m, 1e-5, 2.0) <= pro_prime_upper_geometric(m, 1e-5, Pareto{2.0, 1e15}) + 1e-9);
}

TEST_CASE("quadrature") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-10) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(integrate([](double x) { return x * x; }, -1.0, 2.0, 1e-12) == doctest::Approx(3.0).epsilon(1e-11));
  for (double alpha : {1.5, 2.0, 4.0})
    CHECK(integrate_power_tail([](double) { return 1.0; }, 2.0, alpha, 1e-10) ==
          doctest::Approx(std::pow(2.0, 1.0 - alpha) / (alpha - 1.0)).epsilon(1e-7));
}
