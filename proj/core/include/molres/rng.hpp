#pragma once

#include <cstdint>

#include "molres/geometry.hpp"

namespace molres {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

} // namespace detail

/// xoshiro256++ stream. Small fixed state so every agent can own one;
/// results are identical regardless of standard library or worker count.
class Rng {
public:
    Rng() : Rng(0xD1B54A32D192ED03ULL) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    /// Stream derived from (master seed, purpose tag, element index).
    static Rng stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
        std::uint64_t sm = master;
        sm ^= detail::splitmix64(tag);
        sm ^= detail::splitmix64(index) + 0x9E3779B97F4A7C15ULL * (index + 1);
        return Rng(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform direction on the unit sphere (two draws: cos(polar), azimuth).
    Vec3 unit_vector() {
        const double z = 2.0 * uniform() - 1.0;
        const double phi = 6.283185307179586476925286766559 * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

private:
    std::uint64_t state_[4] = {};
};

/// Stream tags, one per consumer so streams never collide.
namespace stream_tag {
inline constexpr std::uint64_t bacterium = 0x62616374ULL;  // "bact"
inline constexpr std::uint64_t artificial_cell = 0x6163ULL; // "ac"
inline constexpr std::uint64_t placement = 0x706c6163ULL;  // "plac"
} // namespace stream_tag

} // namespace molres
