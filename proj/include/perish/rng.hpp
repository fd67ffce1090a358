#pragma once

#include <cstdint>
#include <random>

namespace perish {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to turn (master, index) pairs into independent seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Rng make_rng(std::uint64_t seed);

// Uniform on [0, 1) with 53 bits of resolution.
double uniform01(Rng& rng);
// Uniform on (0, 1]; safe to take log of.
double uniform_open0(Rng& rng);

// Number of trials until the first success, support {1, 2, ...}.
std::int64_t sample_geometric_trials(Rng& rng, double success_prob);

// Per-trial streams. Every trial gets three independent generators so that
// policies can be swapped without perturbing the realization.
struct TrialStreams {
  Rng realization;
  Rng policy;
  Rng coin;
};
TrialStreams trial_streams(std::uint64_t master, std::uint64_t trial);

}  // namespace perish
