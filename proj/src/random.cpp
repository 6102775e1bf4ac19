#include "cshap/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "cshap/error.hpp"

namespace cshap::random {

std::uint64_t uniform_index(Engine& rng, std::uint64_t bound) {
    if (bound == 0) {
        throw Error(ErrorCode::InvalidArgument, "uniform_index: bound must be positive");
    }
    // Largest multiple of bound that fits; draws above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return draw % bound;
}

double uniform_unit(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Engine& rng) {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t count,
                                                    std::uint64_t seed) {
    if (count > pool) {
        throw Error(ErrorCode::InsufficientTrainingData,
                    "cannot draw " + std::to_string(count) + " samples from a pool of " +
                        std::to_string(pool));
    }
    std::vector<std::size_t> order(pool);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Engine rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool - i));
        std::swap(order[i], order[j]);
    }
    order.resize(count);
    return order;
}

} // namespace cshap::random
