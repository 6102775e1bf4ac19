#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cshap::random {

// std::mt19937_64's output sequence is fixed by the standard; the helpers
// below avoid the implementation-defined std distributions so seeded results
// match across standard libraries.
using Engine = std::mt19937_64;

// Uniform integer in [0, bound) by rejection sampling.
std::uint64_t uniform_index(Engine& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Engine& rng);

// Standard normal draw via Box-Muller (one value per call; no caching).
double standard_normal(Engine& rng);

// First `count` entries of a seeded Fisher-Yates shuffle of 0..pool-1.
std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t count,
                                                    std::uint64_t seed);

} // namespace cshap::random
