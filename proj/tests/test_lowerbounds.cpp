#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "perish/lowerbounds.hpp"

using namespace perish;

namespace {

// VPro and Pro of a general-horizon construction by enumerating every value sequence of length n.
std::pair<double, double> enumerate_general(const GeneralHorizon& g) {
  const auto& atoms = g.instance.values.iid->atoms();
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::vector<std::size_t> idx(n, 0);
  double vpro = 0.0, pro = 0.0;
  while (true) {
    double p = 1.0;
    for (std::size_t t = 0; t < n; ++t) p *= atoms[idx[t]].second;
    double best = 0.0, prophet = 0.0, running = 0.0;
    std::size_t next = 0;
    for (std::size_t t = 0; t < n; ++t) {
      running = std::max(running, atoms[idx[t]].first);
      if (next <= static_cast<std::size_t>(g.k) && static_cast<Step>(t + 1) == g.checkpoints[next]) {
        double reach = 0.0;
        for (std::size_t j = next; j < g.pi.size(); ++j) reach += g.pi[j];
        best = std::max(best, reach * running);
        prophet += g.pi[next] * running;
        ++next;
      }
    }
    vpro += p * best;
    pro += p * prophet;
    std::size_t t = 0;
    while (t < n && ++idx[t] == atoms.size()) idx[t++] = 0;
    if (t == n) break;
  }
  return {vpro, pro};
}

}  // namespace

TEST_CASE("pareto geometric generator") {
  const Instance a = gen_pareto_geometric(1, 0.5, 2.0);
  REQUIRE(a.m() == 1);
  CHECK(a.horizons[0].mean() == doctest::Approx(2.0));
  CHECK(a.values.iid->tail_ge(4.0) == doctest::Approx(1.0 / 16));
  const Instance b = gen_pareto_geometric(5, 0.01, 3.0);
  CHECK(b.m() == 5);
  CHECK(b.horizons[3].survival(100) == doctest::Approx(std::pow(0.99, 99)));
  CHECK(std::abs(b.horizons[3].survival(100) - std::exp(-1.0)) < 0.01);
  CHECK_THROWS(gen_pareto_geometric(2, 0.6, 2.0));
  CHECK_THROWS(gen_pareto_geometric(1, 0.1, 1.0));
}

TEST_CASE("loglog generator") {
  const double q = loglog_q(32);
  CHECK(q == doctest::Approx(std::pow(31.0 / 32.0, 32)));
  CHECK(q == doctest::Approx(0.3621).epsilon(1e-3));
  CHECK((q >= 0.25 && q <= 1.0 / std::numbers::e));
  for (std::size_t m : {32, 64, 1024, 32768}) {
    const Instance inst = gen_loglog(m);
    const int L = static_cast<int>(std::log2(static_cast<double>(m)));
    const auto& atoms = inst.values.iid->atoms();
    CHECK(atoms.size() == static_cast<std::size_t>(L - 2 + 1));
    CHECK(atoms.front().first == 0.0);
    double total = 0.0;
    for (auto [v, p] : atoms) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    const double qm = loglog_q(m);
    for (int t = 3; t <= L; ++t) {
      CHECK(atoms[static_cast<std::size_t>(t - 2)].first == doctest::Approx(1.0 / (std::pow(qm, t) * t * t)));
      CHECK(inst.values.iid->tail_ge(atoms[static_cast<std::size_t>(t - 2)].first) == doctest::Approx(std::pow(qm, t)));
    }
    CHECK(inst.m() == m);
    CHECK(inst.horizons[0].mean() == doctest::Approx(static_cast<double>(m)));
    CHECK(is_mhr(inst.horizons[0], 10000));
  }
  CHECK_THROWS(gen_loglog(16));
  CHECK_THROWS(gen_loglog(48));
}

TEST_CASE("fast fixed-price kernel has the simulator's law") {
  const Instance inst = gen_loglog(32);
  const ValueDistribution& v = *inst.values.iid;
  for (std::size_t j : {1, 3}) {
    const ThresholdRule rule = price_rule(v, v.atoms()[j].first);
    const WelfareEstimate fast = estimate_fixed_price_fast(inst, rule, 20000, 3);
    const PolicyFactory f = [&inst, rule](std::uint64_t) { return fixed_price_multi(inst, rule); };
    const WelfareEstimate slow = estimate_policy(inst, f, 20000, 4);
    CHECK(std::abs(fast.mean - slow.mean) <= 3.0 * std::hypot(fast.std_error, slow.std_error));
    CHECK(fast.mean <= loglog_sing_bound(32, v, v.atoms()[j].first) + 3.0 * fast.std_error);
  }
}

TEST_CASE("loglog report") {
  const LowerBoundReport r = eval_loglog(32, 300, 5);
  const Instance inst = gen_loglog(32);
  const auto& atoms = inst.values.iid->atoms();
  for (const auto& [a, p] : atoms) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", a);
    const Quantity& w = r.get(std::string("welfare@") + buf);
    CHECK(w.monte_carlo);
    CHECK(w.value <= r.get(std::string("sing_bound@") + buf).value + 3.0 * w.std_error);
  }
  CHECK(r.get("ratio").value > 1.0);
  CHECK(r.gap == r.get("ratio").value);
  CHECK_THROWS_AS(r.get("missing"), std::out_of_range);
}

TEST_CASE("general horizon generator") {
  const GeneralHorizon g = gen_general_horizon(2);
  CHECK(g.k == 4);
  CHECK(g.n == 256);
  CHECK(g.checkpoints == std::vector<Step>{1, 4, 16, 64, 256});
  const std::vector<double> pi{0.5, 0.25, 0.125, 0.0625, 0.0625};
  for (std::size_t i = 0; i < pi.size(); ++i) {
    CHECK(g.pi[i] == doctest::Approx(pi[i]));
    CHECK(g.instance.horizons[0].pmf(g.checkpoints[i]) == doctest::Approx(pi[i]));
  }
  double vmass = 0.0;
  for (auto [v, p] : g.instance.values.iid->atoms()) vmass += p;
  CHECK(vmass == doctest::Approx(1.0).epsilon(1e-14));
  for (int c : {1, 2, 3}) CHECK_FALSE(is_mhr(gen_general_horizon(c).instance.horizons[0], 1 << 30));
  const GeneralHorizon g3 = gen_general_horizon(3);
  const auto& atoms = g3.instance.values.iid->atoms();
  CHECK(atoms.front().first == doctest::Approx(std::exp2(1.0 / 3.0)));
  CHECK(atoms.back().second == doctest::Approx(std::exp2(-23.0)));
  CHECK_THROWS(gen_general_horizon(0));
  CHECK_THROWS(gen_general_horizon(4));
}

TEST_CASE("general horizon c=1 against enumeration") {
  const GeneralHorizon g = gen_general_horizon(1);
  const auto [vpro, pro] = enumerate_general(g);
  CHECK(general_horizon_vpro_exact(g) == doctest::Approx(vpro).epsilon(1e-12));
  CHECK(general_horizon_pro_exact(g) == doctest::Approx(pro).epsilon(1e-12));
  CHECK(pro == doctest::Approx(3.34375));
  const LowerBoundReport r = eval_general_horizon(1, 20000, 3);
  for (auto [name, exact] : {std::pair{"vpro", vpro}, {"pro", pro}}) {
    const Quantity& q = r.get(name);
    CHECK(std::abs(q.value - exact) <= 3.0 * q.std_error);
  }
}

TEST_CASE("general horizon bounds") {
  for (int c : {1, 2, 3}) {
    const GeneralHorizon g = gen_general_horizon(c);
    const double vpro = general_horizon_vpro_exact(g), pro = general_horizon_pro_exact(g);
    CHECK(vpro <= general_horizon_vpro_upper(g) + 1e-9);
    CHECK(general_horizon_pro_lower(g) <= pro + 1e-9);
    CHECK(general_horizon_pro_lower_closed(g) == doctest::Approx(0.5 * (g.k + 1) * (1.0 - std::exp(-1.0))));
    if (c >= 2) CHECK(general_horizon_pro_lower_closed(g) >= 0.3 * g.k);
    Rng rng = make_rng(static_cast<std::uint64_t>(c));
    std::vector<double> xs(20000);
    for (auto& x : xs) x = general_horizon_vpro_sample(g, rng);
    const WelfareEstimate e = summarize(xs);
    CHECK(std::abs(e.mean - vpro) <= 3.0 * e.std_error);
  }
  CHECK(general_horizon_pro_exact(gen_general_horizon(3)) / general_horizon_vpro_exact(gen_general_horizon(3)) >
        general_horizon_pro_exact(gen_general_horizon(2)) / general_horizon_vpro_exact(gen_general_horizon(2)));
}

TEST_CASE("max of draws") {
  const ValueDistribution u = uniform_int_values(1, 4);
  Rng rng = make_rng(12);
  const std::size_t n = 100000;
  std::size_t top = 0, bottom = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample_max_of(u, 3.0, rng);
    top += x == 4.0;
    bottom += x == 1.0;
  }
  const WelfareEstimate ft = frequency(top, n), fb = frequency(bottom, n);
  CHECK(std::abs(ft.mean - (1.0 - std::pow(0.75, 3))) <= 3.0 * ft.std_error);
  CHECK(std::abs(fb.mean - std::pow(0.25, 3)) <= 3.0 * fb.std_error);
}

TEST_CASE("low-rate geometric report") {
  const LowerBoundReport r = eval_low_rate_geometric(1, 1e-4, 2.0, 20000, 7);
  const double ratio = r.get("ratio").value;
  CHECK(std::abs(ratio / (std::numbers::pi / 2) - 1.0) < 0.05);
  CHECK(r.get("alg_prime").value == doctest::Approx(100.0));
  CHECK(r.get("ratio_limit_large_m").value == doctest::Approx(2.0));
  CHECK(r.get("pro_prime_finite_m_lb").value <= r.get("pro_prime_upper").value);
  CHECK(r.get("pro").monte_carlo);
  for (double a : {1.5, 3.0}) CHECK(ratio_lb_alpha(2.0).finite_m >= ratio_lb_alpha(a).finite_m);
}
