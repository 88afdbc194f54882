#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace prwlab {

/// SplitMix64 output function. Used to turn structured identifiers
/// (master seed, replica, role, tree path) into well-mixed 64-bit seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class StreamRole : std::uint64_t {
    tree = 1,
    overshoot = 2,
    monte_carlo = 3,
    sampling = 4,
};

/// Seed of the stream owned by (master seed, replica, role). Any replica can
/// be regenerated in isolation from these three values.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                                    StreamRole role) noexcept {
    return mix64(mix64(mix64(master) ^ replica) ^ static_cast<std::uint64_t>(role));
}

/// Key of the `index`-th child of the tree node keyed `parent`.
constexpr std::uint64_t child_key(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// xoshiro256** generator. Cheap to seed, which matters because the branching
/// simulator gives every tree node its own stream.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace prwlab
