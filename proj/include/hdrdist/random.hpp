#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hdrdist {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw
// is a pure function of (key, counter), so a site's random value does not
// depend on traversal order or thread schedule.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

// Separates the random streams of different pipeline stages that share a seed.
enum class Stream : std::uint32_t {
    PixelNoise = 1,
    RowColNoise = 2,
    VirtualSensorPixel = 3,
    VirtualSensorLine = 4,
    BurstFusion = 5,
    HetGaussNoise = 6,
    PatchOrigin = 7,
};

// Random draws for one addressed site: (seed, stream, item, site, lane).
class SiteRandom {
public:
    SiteRandom(std::uint64_t seed, Stream stream, std::uint32_t item, std::uint32_t site,
               std::uint32_t lane = 0) noexcept {
        const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        words_ = Philox4x32::generate({static_cast<std::uint32_t>(stream), item, site, lane}, key);
    }

    // Uniform in [0, 1) with 53 random bits taken from words (2i, 2i+1).
    double uniform(int i = 0) const noexcept {
        const std::uint64_t hi = words_[2 * i] >> 5;
        const std::uint64_t lo = words_[2 * i + 1] >> 6;
        return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller over both uniforms.
    double normal() const noexcept {
        const double u1 = 1.0 - uniform(0); // (0, 1]
        const double u2 = uniform(1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    const Philox4x32::Counter& words() const noexcept { return words_; }

private:
    Philox4x32::Counter words_{};
};

} // namespace hdrdist
