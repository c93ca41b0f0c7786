#pragma once

#include <cstdint>

namespace tclsim {

/// SplitMix64 generator. 8 bytes of state, so a large fleet can afford one
/// stream per appliance and purpose.
class RandomStream {
public:
    RandomStream() = default;
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t x = (state_ += 0x9E3779B97F4A7C15ULL);
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_ = 0;
};

enum class StreamPurpose : std::uint64_t {
    fleet_generation = 1,
    initialization = 2,
    switching = 3,
    step_jitter = 4,
};

/// Derives an independent stream from (seed, appliance index, purpose).
/// Draws depend only on the appliance's own history, never on iteration
/// order or worker count.
inline RandomStream make_stream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose) {
    const auto mix = [](std::uint64_t x) {
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    std::uint64_t h = mix(seed ^ 0xD1B54A32D192ED03ULL);
    h = mix(h ^ (index * 0x9E3779B97F4A7C15ULL));
    h = mix(h ^ (static_cast<std::uint64_t>(purpose) * 0xBF58476D1CE4E5B9ULL));
    return RandomStream(h);
}

}  // namespace tclsim
