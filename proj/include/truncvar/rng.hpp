#pragma once

#include <cmath>
#include <cstdint>

namespace truncvar {

// sm64ctr, version 1 - a counter-based pseudo-random stream.
//
// Word i (i = 0, 1, 2, ...) of the stream with a given 64-bit seed:
//   z    = seed + (i + 1) * 0x9E3779B97F4A7C15        (mod 2^64)
//   z    = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z    = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   word = z ^ (z >> 31)
//
// uniform_open(seed, i) maps word i to the open interval (0; 1):
//   ((word >> 11) + 0.5) * 2^-53
//
// derive(seed, k) is the seed of an independent substream:
//   finalize(seed + (k + 1) * 0xD1B54A32D192ED03)
// with the same finalizer as above. The distinct odd increment keeps derived
// seeds off the word lattice of the parent stream.
//
// normal(seed, i) consumes words 2i and 2i+1 (Box-Muller):
//   sqrt(-2 ln u1) * cos(2 pi u2)
// stable(seed, i, a) consumes the same two words (Chambers-Mallows-Stuck,
// symmetric case, unit scale):
//   V = pi (u1 - 1/2),  W = -ln u2
//   a = 1:  tan(V)
//   else :  sin(aV) / cos(V)^(1/a) * ( cos((a-1)V) / W )^((1-a)/a)
// The a = 2 case is Gaussian with variance 2 under this convention.

namespace rng {

constexpr std::uint64_t kStreamIncrement = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kDeriveIncrement = 0xD1B54A32D192ED03ull;

inline std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t index) {
    return finalize(seed + (index + 1) * kStreamIncrement);
}

inline double uniform_open(std::uint64_t seed, std::uint64_t index) {
    return (static_cast<double>(word(seed, index) >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
    return finalize(seed + (k + 1) * kDeriveIncrement);
}

inline double normal(std::uint64_t seed, std::uint64_t pair_index) {
    const double u1 = uniform_open(seed, 2 * pair_index);
    const double u2 = uniform_open(seed, 2 * pair_index + 1);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline double stable_symmetric(std::uint64_t seed, std::uint64_t pair_index, double a) {
    const double u1 = uniform_open(seed, 2 * pair_index);
    const double u2 = uniform_open(seed, 2 * pair_index + 1);
    constexpr double pi = 3.1415926535897932384626433832795;
    const double v = pi * (u1 - 0.5);
    const double w = -std::log(u2);
    if (a == 1.0) return std::tan(v);
    return std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
           std::pow(std::cos((a - 1.0) * v) / w, (1.0 - a) / a);
}

} // namespace rng

/// Stateful cursor over one sm64ctr stream. Consumption order is part of the
/// reproducibility contract: every call advances the counter by the number
/// of words it uses.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

    double next_uniform() { return rng::uniform_open(seed_, counter_++); }

    double next_normal() {
        const double z = rng::normal(seed_, pair_counter());
        counter_ += 2;
        return z;
    }

    double next_stable(double a) {
        const double z = rng::stable_symmetric(seed_, pair_counter(), a);
        counter_ += 2;
        return z;
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    // normal/stable pairs must start on an even word
    std::uint64_t pair_counter() {
        if (counter_ % 2 != 0) ++counter_;
        return counter_ / 2;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace truncvar
