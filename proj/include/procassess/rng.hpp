#pragma once

#include <cstdint>
#include <string_view>

namespace procassess {

/// SplitMix64 (Steele, Lea & Flood). Chosen for datasets because its output
/// is fully specified by the algorithm, unlike the standard distributions.
class SplitMix64 {
public:
    static constexpr std::string_view kAlgorithmName = "splitmix64";

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound) by rejection; exact for every bound > 0.
    constexpr std::uint64_t uniform(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double uniform_real() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Independent child stream.
    constexpr SplitMix64 split() noexcept { return SplitMix64(next()); }

private:
    std::uint64_t state_;
};

/// Seed for one work item derived from a root seed, a label and an ordinal.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                    std::uint64_t ordinal) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    SplitMix64 mix(root ^ h);
    mix.next();
    SplitMix64 second(mix.next() ^ (ordinal * 0xD1B54A32D192ED03ULL));
    return second.next();
}

}  // namespace procassess
