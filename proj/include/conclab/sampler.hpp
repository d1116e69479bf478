#pragma once

#include "conclab/product_space.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace conclab {

/// Deterministic i.i.d. state sampler: coordinate i is drawn from factor i
/// by inverse CDF over a fixed 53-bit uniform, so identical (space, seed)
/// produce bit-identical streams on any platform.
class SampleStream {
public:
    SampleStream(SpacePtr space, std::uint64_t seed);

    Index next();

    /// Uniform in [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    SpacePtr space_;
    std::mt19937_64 rng_;
    std::vector<std::vector<double>> cdf_;  // per factor, cumulative probabilities
};

std::vector<Index> sample_states(SpacePtr space, std::uint64_t seed, Index count);

}  // namespace conclab
