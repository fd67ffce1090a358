#include <doctest.h>

#include <sstream>

#include "generators.hpp"
#include "perish/simulator.hpp"

using namespace perish;

namespace {

class PostRule : public Policy {
 public:
  explicit PostRule(ThresholdRule r) : rule_(r) {}
  ThresholdRule post(const StepView&) override { return rule_; }
  std::optional<std::size_t> select(const StepView& v) override { return first_available(v.items); }
  std::string name() const override { return "post"; }

 private:
  ThresholdRule rule_;
};

// Always tries item 0, even after it is gone.
class Rogue : public Policy {
 public:
  ThresholdRule post(const StepView&) override { return ThresholdRule::accept_all(); }
  std::optional<std::size_t> select(const StepView&) override { return 0; }
  std::string name() const override { return "rogue"; }
};

ThresholdRule price(double p) { return {p, 1.0, 0.0}; }

}  // namespace

TEST_CASE("episode examples") {
  const Instance inst = make_iid_instance(1, Deterministic{2}, uniform_int_values(1, 9));
  Rng coin = make_rng(1);
  PostRule all(ThresholdRule::accept_all());
  const EpisodeTrace a = run_episode(inst, Realization{{2}, {1, 9}}, all, coin);
  CHECK(a.welfare == 1.0);
  REQUIRE(a.matches.size() == 1);
  CHECK(a.matches[0].step == 1);

  PostRule five(price(5.0));
  CHECK(run_episode(inst, Realization{{2}, {1, 9}}, five, coin).welfare == 9.0);
  PostRule five_again(price(5.0));
  CHECK(run_episode(inst, Realization{{1}, {1}}, five_again, coin).welfare == 0.0);
}

TEST_CASE("audit catches matching an unavailable item") {
  const Instance inst = make_iid_instance(2, Deterministic{3}, uniform_int_values(1, 9));
  Rogue rogue;
  Rng coin = make_rng(1);
  CHECK_THROWS_AS(run_episode(inst, Realization{{3, 3}, {1, 2, 3}}, rogue, coin), AuditViolation);
}

TEST_CASE("traces conserve welfare and respect horizons") {
  const Instance inst = make_iid_instance(6, Geometric{4.0}, uniform_int_values(1, 20));
  const StagePlan plan = build_stage_plan(inst);
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const Realization r = realize(inst, rng);
    auto pol = rep % 2 ? multiple_mhr(inst, plan, static_cast<std::uint64_t>(rep)) : blind_match(inst);
    Rng coin = make_rng(static_cast<std::uint64_t>(rep));
    const EpisodeTrace tr = run_episode(inst, r, *pol, coin, true);
    double total = 0.0;
    std::vector<char> used(inst.m(), 0);
    for (const Match& mt : tr.matches) {
      total += mt.value;
      CHECK(mt.step <= r.horizons[mt.item]);
      CHECK_FALSE(used[mt.item]);
      used[mt.item] = 1;
      CHECK(mt.value == r.value_at(mt.step));
    }
    CHECK(total == tr.welfare);
    CHECK(tr.welfare <= prophet_offline(r).welfare);
    for (const StepRecord& s : tr.steps)
      if (s.matched) CHECK(s.accepted);
  }
}

TEST_CASE("trace dump") {
  const Instance inst = make_iid_instance(1, Deterministic{2}, uniform_int_values(1, 9));
  PostRule five(price(5.0));
  Rng coin = make_rng(1);
  std::ostringstream os;
  write_episode_trace(os, run_episode(inst, Realization{{2}, {1, 9}}, five, coin, true));
  CHECK(os.str().find('9') != std::string::npos);
}

TEST_CASE("deterministic instance has zero error") {
  const Instance inst = make_iid_instance(3, Deterministic{4}, point_mass(2.0));
  const MonteCarloResult r = monte_carlo(inst, make_policy_factory(inst, "blind"), 100, 1);
  CHECK(r.alg.mean == 6.0);
  CHECK(r.alg.std_error == 0.0);
  CHECK(r.pro.std_error == 0.0);
  CHECK(r.ratio == 1.0);
}

TEST_CASE("reproducible and thread-count independent") {
  const Instance inst = make_iid_instance(30, Geometric{6.0}, uniform_int_values(1, 50));
  const PolicyFactory f = make_policy_factory(inst, "multiple_mhr");
  const MonteCarloResult a = monte_carlo(inst, f, 3000, 77);
  const MonteCarloResult b = monte_carlo(inst, f, 3000, 77);
  const MonteCarloResult c = monte_carlo(inst, f, 3000, 77, true, {ExecMode::Parallel, 4});
  const MonteCarloResult d = monte_carlo_serial(inst, f, 3000, 77);
  for (const MonteCarloResult* x : {&b, &c, &d}) {
    CHECK(x->alg.mean == a.alg.mean);
    CHECK(x->alg.std_error == a.alg.std_error);
    CHECK(x->pro.mean == a.pro.mean);
    CHECK(x->ratio == a.ratio);
  }
  CHECK(monte_carlo(inst, f, 3000, 78).alg.mean != a.alg.mean);
}

TEST_CASE("single fixed price matches its closed form") {
  const Instance inst = make_iid_instance(1, Geometric{2.0}, uniform_int_values(1, 4));
  const MonteCarloResult r = monte_carlo(inst, make_policy_factory(inst, "single_fixed"), 100000, 2024);
  CHECK(std::abs(r.alg.mean - 7.0 / 3.0) <= 3.0 * r.alg.std_error);
  CHECK(r.ratio <= 1.5 + 3.0 * r.ratio_std_error);
}

TEST_CASE("common random numbers reduce the ratio error") {
  const Instance inst = make_iid_instance(5, Geometric{4.0}, uniform_int_values(1, 100));
  const PolicyFactory f = make_policy_factory(inst, "blind");
  const MonteCarloResult coupled = monte_carlo(inst, f, 100000, 5, true);
  const MonteCarloResult apart = monte_carlo(inst, f, 100000, 5, false);
  CHECK(coupled.ratio_std_error <= apart.ratio_std_error);
  CHECK(std::abs(coupled.pro.mean - apart.pro.mean) <= 3.0 * std::hypot(coupled.pro.std_error, apart.pro.std_error));
  CHECK(coupled.alg.mean == apart.alg.mean);
}

TEST_CASE("policy estimate ignores the prophet") {
  const Instance inst = make_iid_instance(4, Geometric{3.0}, uniform_int_values(1, 10));
  const PolicyFactory f = make_policy_factory(inst, "blind");
  CHECK(estimate_policy(inst, f, 2000, 9).mean == monte_carlo(inst, f, 2000, 9).alg.mean);
}
