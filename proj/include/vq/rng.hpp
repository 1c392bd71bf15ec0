#pragma once

#include <cstdint>
#include <cmath>

namespace vq {

// SplitMix64 (Steele, Lea, Vigna). Chosen as the project-wide generator
// because its output is a pure function of a 64-bit state, which makes
// seeded runs reproducible across platforms, and derived streams are
// cheap: mixing the seed with a stream id gives an independent sequence.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Box-Muller. std::normal_distribution is implementation-defined,
    // so the transform is spelled out to keep sequences stable.
    double gaussian(double mean, double stddev) {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Index in [0, n) without modulo bias worth worrying about at n << 2^64.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
    }

    // Independent child stream for restart r / bench cell r.
    static SplitMix64 derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

}  // namespace vq
