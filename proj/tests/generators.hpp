#pragma once

// Hand-rolled generators shared by the property tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "perish/prophet.hpp"

namespace perish::testgen {

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Continue probabilities that never increase, ending with certain departure: always MHR.
inline HorizonDistribution random_mhr(Rng& rng, int max_support = 60) {
  const int T = uniform_int(rng, 1, max_support);
  double c = 0.05 + 0.94 * uniform01(rng);
  double s = 1.0;
  std::vector<std::pair<Step, double>> pmf;
  for (int t = 1; t <= T; ++t) {
    const double cont = t == T ? 0.0 : c;
    pmf.emplace_back(t, s * (1.0 - cont));
    s *= cont;
    c *= 0.8 + 0.2 * uniform01(rng);
  }
  return ExplicitPmf{pmf};
}

inline ValueDistribution random_discrete(Rng& rng, int max_atoms = 6) {
  const int k = uniform_int(rng, 1, max_atoms);
  std::vector<int> vals(20);
  for (int j = 0; j < 20; ++j) vals[static_cast<std::size_t>(j)] = j;
  std::shuffle(vals.begin(), vals.end(), rng);
  vals.resize(static_cast<std::size_t>(k));
  std::sort(vals.begin(), vals.end());
  std::vector<std::pair<double, double>> atoms;
  double total = 0.0;
  for (int v : vals) {
    const double w = 0.01 + uniform01(rng);
    atoms.emplace_back(v, w);
    total += w;
  }
  double used = 0.0;
  for (std::size_t j = 0; j + 1 < atoms.size(); ++j) used += (atoms[j].second /= total);
  atoms.back().second = 1.0 - used;
  return DiscreteAtoms{atoms};
}

inline Realization random_realization(Rng& rng, int max_items, int max_T) {
  Realization r;
  const int m = uniform_int(rng, 1, max_items);
  for (int i = 0; i < m; ++i) r.horizons.push_back(uniform_int(rng, 1, max_T));
  const Step T = *std::max_element(r.horizons.begin(), r.horizons.end());
  for (Step t = 0; t < T; ++t) r.values.push_back(uniform_int(rng, 0, 9));
  return r;
}

}  // namespace perish::testgen
