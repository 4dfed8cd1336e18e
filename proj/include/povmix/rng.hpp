#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace povmix {

// Output mixing function of SplitMix64 (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: maps (master, a, b, c) to a stream seed
// independently of evaluation order, so per-replicate generators can be
// created from a master seed under any parallel schedule.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t a,
                                    std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (b + 0x6a09e667f3bcc909ULL));
    h = mix64(h ^ (c + 0xbb67ae8584caa73bULL));
    return h;
}

// Seeded generator with the exact primitives the samplers are specified
// against. mt19937_64 is pinned by the standard, and the uniform/normal
// transforms below are spelled out here rather than taken from
// std::*_distribution, whose algorithms are implementation-defined; this
// keeps streams identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1); never returns an endpoint, so
    // log/tan/power transforms downstream stay finite.
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        constexpr double two_pi = 6.283185307179586476925287;
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace povmix
