#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

namespace sketchid::rng {

// All randomness in the library flows from 64-bit integer arithmetic so that
// hash-based sketches replay bit-identically on every platform. Streams are
// keyed by (seed, stream id); there is no hidden global state.

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output function.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of an independent substream, e.g. one per tensor mode or per trial.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(mix(seed + kGolden) ^ mix(stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

/// Sequential SplitMix64 generator.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t key) noexcept : state_(key) {}

    constexpr std::uint64_t next() noexcept { return mix(state_ += kGolden); }

    /// Uniform integer in [0, n), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) noexcept {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// +1.0 or -1.0 with equal probability.
    double sign() noexcept { return (next() >> 63) != 0 ? -1.0 : 1.0; }

    /// Uniform double in (0, 1].
    double unit() noexcept { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by `gen`.
template <typename T>
void shuffle(std::span<T> values, SplitMix64& gen) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(gen.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

/// Standard normal pair (Box-Muller) at a counter position of the keyed stream.
/// Random access: the value depends only on (key, counter).
inline void gaussian_pair(std::uint64_t key, std::uint64_t counter, double& z0, double& z1) noexcept {
    const std::uint64_t a = mix(key + (2 * counter + 1) * kGolden);
    const std::uint64_t b = mix(key + (2 * counter + 2) * kGolden);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
}

/// Fills `out` with the standard normals at block `block` of the keyed stream.
/// Blocks of equal length never overlap, so block b is always the same vector.
inline void gaussian_block(std::uint64_t key, std::uint64_t block, std::span<double> out) noexcept {
    const std::uint64_t pairs = (out.size() + 1) / 2;
    for (std::uint64_t p = 0; p < pairs; ++p) {
        double z0 = 0.0, z1 = 0.0;
        gaussian_pair(key, block * pairs + p, z0, z1);
        out[2 * p] = z0;
        if (2 * p + 1 < out.size()) out[2 * p + 1] = z1;
    }
}

}  // namespace sketchid::rng
