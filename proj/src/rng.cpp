#include "rmtlab/rng.hpp"

#include <cmath>

namespace rmtlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    // 53 random bits mapped to the open interval (0, 1).
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(splitmix64(base_seed) ^ (index * 0xD1B54A32D192ED03ull + 1));
}

std::array<double, 2> CounterRng::uniform_pair(std::uint64_t index, std::uint32_t lane) const {
    // Counter layout: 64-bit index, 32-bit lane, low 32 bits of the stream id;
    // the key carries the seed mixed with the high stream bits.
    const std::uint64_t k = splitmix64(seed_ ^ (stream_ >> 32) * 0x2545F4914F6CDD1Dull);
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index),
                                           static_cast<std::uint32_t>(index >> 32), lane,
                                           static_cast<std::uint32_t>(stream_)};
    const auto out = philox4x32(ctr, {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)});
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t index, std::uint32_t lane) const {
    const auto [u1, u2] = uniform_pair(index, lane);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * kPi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

Complex CounterRng::complex_normal(std::uint64_t index, std::uint32_t lane) const {
    const auto g = normal_pair(index, lane);
    return Complex(g[0], g[1]) * std::sqrt(0.5);
}

} // namespace rmtlab
