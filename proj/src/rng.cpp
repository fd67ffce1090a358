#include "perish/rng.hpp"

#include <cmath>
#include <limits>

namespace perish {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_open0(Rng& rng) {
  return 1.0 - uniform01(rng);
}

std::int64_t sample_geometric_trials(Rng& rng, double success_prob) {
  if (success_prob >= 1.0) return 1;
  if (success_prob <= 0.0) return std::numeric_limits<std::int64_t>::max();
  const double u = uniform_open0(rng);
  const double k = std::floor(std::log(u) / std::log1p(-success_prob));
  if (k >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return 1 + static_cast<std::int64_t>(k);
}

TrialStreams trial_streams(std::uint64_t master, std::uint64_t trial) {
  const std::uint64_t s = derive_seed(master, trial);
  return {make_rng(derive_seed(s, 0)), make_rng(derive_seed(s, 1)), make_rng(derive_seed(s, 2))};
}

}  // namespace perish
