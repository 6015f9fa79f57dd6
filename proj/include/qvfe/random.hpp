#pragma once

#include <cstdint>
#include <limits>

namespace qvfe {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based generator keyed by (seed, stream).
///
/// Each stream is an independent SplitMix64 sequence whose starting state is a
/// hash of the key, so sample i can be drawn without touching samples 0..i-1.
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class KeyedRng {
public:
    using result_type = std::uint64_t;

    KeyedRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(splitmix64(seed ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

} // namespace qvfe
