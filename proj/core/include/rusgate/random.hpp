#pragma once

#include <cstdint>
#include <random>

namespace rusgate {

using Rng = std::mt19937_64;

// Stable per-run seed: splitmix64 finalizer over (master, index). Independent
// of thread scheduling, so ensembles are reproducible bit for bit.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index);

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
// Unlike std::uniform_real_distribution this is identical across standard
// library implementations.
double uniform01(Rng& rng);

}  // namespace rusgate
