#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "perish/prophet.hpp"

using namespace perish;

namespace {

// Exhaustive search: buyer t is skipped or given to any free item still present at t.
double best_assignment(const Realization& r, Step t, std::vector<char>& used) {
  if (t > r.T()) return 0.0;
  double best = best_assignment(r, t + 1, used);
  for (std::size_t i = 0; i < r.horizons.size(); ++i) {
    if (used[i] || r.horizons[i] < t) continue;
    used[i] = 1;
    best = std::max(best, r.value_at(t) + best_assignment(r, t + 1, used));
    used[i] = 0;
  }
  return best;
}

double exhaustive(const Realization& r) {
  std::vector<char> used(r.horizons.size(), 0);
  return best_assignment(r, 1, used);
}

}  // namespace

TEST_CASE("realize") {
  Rng rng = make_rng(1);
  const Instance inst = make_iid_instance(1, Deterministic{3}, point_mass(5.0));
  const Realization r = realize(inst, rng);
  CHECK(r.horizons == std::vector<Step>{3});
  CHECK(r.values == std::vector<double>{5, 5, 5});

  const Instance g = make_iid_instance(4, Geometric{3.0}, uniform_int_values(1, 9));
  Rng a = make_rng(42), b = make_rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const Realization x = realize(g, a), y = realize(g, b);
    CHECK(x.horizons == y.horizons);
    CHECK(x.values == y.values);
    CHECK(x.T() == *std::max_element(x.horizons.begin(), x.horizons.end()));
  }

  CHECK_THROWS_AS(make_iid_instance(1, Deterministic{5}, point_mass(1.0), 4).validate(), DistributionError);
  const Instance capped = make_iid_instance(3, Geometric{50.0}, point_mass(1.0), 2);
  auto many = [&] {
    for (int k = 0; k < 100; ++k) realize(capped, rng);
  };
  CHECK_THROWS_AS(many(), CapExceeded);
}

TEST_CASE("max of two geometric horizons matches the tail sum") {
  const Instance inst = make_iid_instance(2, Geometric{2.0}, point_mass(1.0));
  double exact = 0.0;
  for (Step t = 1; t < 200; ++t) {
    const double below = 1.0 - std::pow(0.5, static_cast<double>(t - 1));
    exact += 1.0 - below * below;
  }
  Rng rng = make_rng(9);
  const std::size_t n = 100000;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = sample_horizons(inst, rng);
    const double x = static_cast<double>(std::max(h[0], h[1]));
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
  CHECK(exact == doctest::Approx(8.0 / 3.0));
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("prophet_offline examples") {
  const Realization r{{2, 4}, {5, 1, 3, 2}};
  const MatchingResult res = prophet_offline(r);
  CHECK(res.welfare == 8.0);
  CHECK(exhaustive(r) == 8.0);
  CHECK(matching_bruteforce(r) == 8.0);
  REQUIRE(res.assignment.size() == 2);
  for (const Match& mt : res.assignment) CHECK(mt.step <= r.horizons[mt.item]);

  CHECK(prophet_offline(Realization{{1}, {6.5}}).welfare == 6.5);
  CHECK(prophet_offline(Realization{{1, 1}, {7}}).welfare == 7.0);
  CHECK(matching_bruteforce(Realization{{1}, {0}}) == 0.0);
}

TEST_CASE("greedy equals exhaustive search") {
  Rng rng = make_rng(1234);
  for (int rep = 0; rep < 1000; ++rep) {
    const Realization r = testgen::random_realization(rng, 5, 8);
    const double oracle = exhaustive(r);
    const MatchingResult g = prophet_offline(r);
    CHECK(g.welfare == oracle);
    CHECK(matching_bruteforce(r) == oracle);
    std::vector<char> item_used(r.horizons.size(), 0), buyer_used(static_cast<std::size_t>(r.T()), 0);
    double total = 0.0;
    for (const Match& mt : g.assignment) {
      CHECK_FALSE(item_used[mt.item]);
      CHECK_FALSE(buyer_used[static_cast<std::size_t>(mt.step - 1)]);
      item_used[mt.item] = buyer_used[static_cast<std::size_t>(mt.step - 1)] = 1;
      CHECK(mt.step <= r.horizons[mt.item]);
      total += mt.value;
    }
    CHECK(total == g.welfare);
  }
}

TEST_CASE("brute force guard") {
  Realization big;
  big.horizons.assign(9, 2);
  big.values = {1, 2};
  CHECK_THROWS(matching_bruteforce(big));
}

TEST_CASE("prophet welfare is monotone") {
  Rng rng = make_rng(77);
  for (int rep = 0; rep < 300; ++rep) {
    Realization r = testgen::random_realization(rng, 6, 10);
    const double base = prophet_offline(r).welfare;

    Realization extended = r;
    const std::size_t i = static_cast<std::size_t>(testgen::uniform_int(rng, 0, static_cast<int>(r.horizons.size()) - 1));
    extended.horizons[i] += 1;
    if (extended.horizons[i] > extended.T()) extended.values.push_back(testgen::uniform_int(rng, 0, 9));
    CHECK(prophet_offline(extended).welfare >= base);

    Realization more = r;
    more.values.push_back(testgen::uniform_int(rng, 0, 9));
    more.horizons.push_back(more.T());
    CHECK(prophet_offline(more).welfare >= base);
  }
}

TEST_CASE("interval form agrees with full realizations") {
  Rng rng = make_rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const Realization r = testgen::random_realization(rng, 6, 12);
    std::vector<Step> hs = r.horizons;
    std::sort(hs.begin(), hs.end());
    std::vector<std::vector<double>> iv(hs.size());
    Step prev = 0;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      for (Step t = prev + 1; t <= hs[j]; ++t) iv[j].push_back(r.value_at(t));
      prev = hs[j];
    }
    CHECK(prophet_over_intervals(hs, iv) == prophet_offline(r).welfare);
  }
}

TEST_CASE("estimate_pro") {
  const Instance two = make_iid_instance(1, Deterministic{2}, DiscreteAtoms{{{0, 0.5}, {1, 0.5}}});
  const WelfareEstimate e = estimate_pro(two, 100000, 3);
  CHECK(std::abs(e.mean - 0.75) <= 3.0 * e.std_error);

  const Instance pm = make_iid_instance(3, Geometric{4.0}, point_mass(5.0));
  const WelfareEstimate p = estimate_pro(make_iid_instance(1, Geometric{4.0}, point_mass(5.0)), 1000, 3);
  CHECK(p.mean == 5.0);
  CHECK(p.std_error == 0.0);
  CHECK(estimate_pro(pm, 200, 1).mean > 5.0);
  CHECK_THROWS(estimate_pro(pm, 1, 1));
}

TEST_CASE("prophet grows linearly on doubling per-step values") {
  for (int n : {10, 20}) {
    std::vector<ValueDistribution> vs;
    for (int h = 1; h <= n; ++h) vs.push_back(point_mass(std::ldexp(1.0, h)));
    Instance inst{{Geometric{2.0}}, ValueProcess::make_per_step(vs)};
    // Pr[h >= k] (2^k - 2^(k-1)) summed, plus the first buyer.
    double exact = 2.0;
    for (int k = 2; k <= n; ++k) exact += std::ldexp(1.0, -(k - 1)) * std::ldexp(1.0, k - 1);
    CHECK(exact == doctest::Approx(n + 1.0));
    const WelfareEstimate e = estimate_pro(inst, 400000, 17, {}, ProphetMode::FullRealization);
    CHECK(e.mean >= 0.4 * n);
    CHECK(std::abs(e.mean - exact) <= 4.0 * e.std_error);
  }
}

TEST_CASE("sampled prophet has the same law") {
  const Instance inst = make_iid_instance(6, Geometric{5.0}, uniform_int_values(1, 50));
  const WelfareEstimate full = estimate_pro(inst, 40000, 8, {}, ProphetMode::FullRealization);
  const WelfareEstimate samp = estimate_pro(inst, 40000, 9, {}, ProphetMode::Sampled);
  CHECK(std::abs(full.mean - samp.mean) <= 3.0 * std::hypot(full.std_error, samp.std_error));
}

TEST_CASE("estimate_pro is reproducible across thread counts") {
  const Instance inst = make_iid_instance(5, Geometric{3.0}, uniform_int_values(1, 20));
  const WelfareEstimate a = estimate_pro(inst, 3000, 21, {ExecMode::Serial, 1});
  const WelfareEstimate b = estimate_pro(inst, 3000, 21, {ExecMode::Parallel, 4});
  const WelfareEstimate c = estimate_pro(inst, 3000, 21, {ExecMode::Parallel, 3});
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(b.mean == c.mean);
}

TEST_CASE("trace output has one line per item and buyer") {
  std::ostringstream os;
  write_trace(os, Realization{{2, 3}, {1, 2, 3}});
  const std::string s = os.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
