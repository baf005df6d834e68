#pragma once

#include <array>
#include <cstdint>

#include "rmtlab/types.hpp"

namespace rmtlab {

/// Philox4x32-10 counter-based generator.
/// Output depends only on (key, counter), so any entry of any stream can be
/// produced independently of traversal order or thread layout.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Replica seed = splitmix64 hash of (base_seed, replica index).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// Keyed stream of random draws addressed by (index, lane).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Two independent uniforms in (0, 1) with 53-bit resolution.
    std::array<double, 2> uniform_pair(std::uint64_t index, std::uint32_t lane = 0) const;

    double uniform(std::uint64_t index, std::uint32_t lane = 0) const {
        return uniform_pair(index, lane)[0];
    }

    /// Pair of independent standard normals (Box-Muller on one Philox block).
    std::array<double, 2> normal_pair(std::uint64_t index, std::uint32_t lane = 0) const;

    /// Circular complex Gaussian with E|g|^2 = 1.
    Complex complex_normal(std::uint64_t index, std::uint32_t lane = 0) const;

    /// A different stream with the same seed.
    CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, splitmix64(stream_ ^ splitmix64(stream + 0x9e37u))); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace rmtlab
