#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hdrdist/blur.hpp"
#include "hdrdist/error.hpp"
#include "hdrdist/fusion.hpp"
#include "support.hpp"

using namespace hdrdist;

// Cubic convolution kernel evaluated from its textbook piecewise form.
static double reference_kernel(double s) {
    s = std::abs(s);
    if (s <= 1.0) return 1.5 * s * s * s - 2.5 * s * s + 1.0;
    if (s < 2.0) return -0.5 * s * s * s + 2.5 * s * s - 4.0 * s + 2.0;
    return 0.0;
}

TEST(CatmullRom, KernelValues) {
    EXPECT_EQ(catmull_rom(0.0), 1.0);
    EXPECT_EQ(catmull_rom(1.0), 0.0);
    EXPECT_EQ(catmull_rom(2.0), 0.0);
    EXPECT_EQ(catmull_rom(0.5), 0.5625);
    EXPECT_EQ(catmull_rom(1.5), -0.0625);
    for (double s = -2.5; s <= 2.5; s += 0.01) EXPECT_NEAR(catmull_rom(s), reference_kernel(s), 1e-14);
}

TEST(Upsample, ConstantStaysConstant) {
    const LinearImage half(5, 3, 3, 0.3);
    for (std::size_t phase : {0u, 1u}) {
        const LinearImage up = bicubic_upsample_2x(half, phase);
        for (double v : up.data()) EXPECT_NEAR(v, 0.3, 1e-15);
    }
}

TEST(Upsample, ReproducesInteriorRamp) {
    LinearImage half(8, 1, 1);
    for (std::size_t j = 0; j < 8; ++j) half.at(j, 0, 0) = 0.1 * static_cast<double>(j);
    const LinearImage up = bicubic_upsample_2x(half, 0);
    // Output x sits at half-resolution coordinate x / 2.
    for (std::size_t x = 2; x < 13; ++x) EXPECT_NEAR(up.at(x, 0, 0), 0.05 * static_cast<double>(x), 1e-14);
}

TEST(Upsample, FourSampleRowMatchesKernel) {
    const std::vector<double> v{0.2, 0.9, 0.4, 0.7};
    const LinearImage half(4, 1, 1, v);
    const LinearImage up = bicubic_upsample_2x(half, 0);
    auto at = [&](int j) { return v[static_cast<std::size_t>(std::clamp(j, 0, 3))]; };
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(up.at(2 * j, 0, 0), v[j]);
    for (int j = 0; j < 4; ++j) {
        double expected = 0.0;
        for (int k = j - 1; k <= j + 2; ++k) expected += reference_kernel(j + 0.5 - k) * at(k);
        EXPECT_NEAR(up.at(static_cast<std::size_t>(2 * j + 1), 0, 0), expected, 1e-15);
    }
}

TEST(Upsample, RowAxisAndPhase) {
    LinearImage half(1, 3, 1, std::vector<double>{1.0, 2.0, 3.0});
    const LinearImage up = bicubic_upsample_2x(half, 1, InterleaveAxis::Row);
    ASSERT_EQ(up.height(), 6u);
    EXPECT_EQ(up.at(0, 1, 0), 1.0);
    EXPECT_EQ(up.at(0, 3, 0), 2.0);
    EXPECT_EQ(up.at(0, 5, 0), 3.0);
    // Between the first two samples the edge sample is replicated: taps 1, 1, 2, 3.
    EXPECT_NEAR(up.at(0, 2, 0), -0.0625 + 0.5625 + 0.5625 * 2.0 - 0.0625 * 3.0, 1e-15);
}

TEST(Weights, HatShape) {
    const FusionWeights w;
    EXPECT_EQ(w.weight(0.0), 0.0);
    EXPECT_EQ(w.weight(0.02), 0.0);
    EXPECT_EQ(w.weight(0.98), 0.0);
    EXPECT_EQ(w.weight(1.0), 0.0);
    EXPECT_NEAR(w.weight(0.5), 0.48, 1e-15);
    EXPECT_NEAR(w.weight(0.1), 0.08, 1e-15);
    EXPECT_THROW((FusionWeights{0.5, 0.4}.validate()), Error);
}

TEST(DirectFuse, Examples) {
    SensorConfig config;
    for (double radiance : {0.1, 0.5}) {
        const LinearImage fused = direct_fuse(synthesize_static_mosaic(LinearImage(16, 8, 3, radiance), config), config);
        for (double v : fused.data()) EXPECT_NEAR(v, radiance, 1e-12);
    }
}

TEST(DirectFuse, ClippedHighFallsBackToLow) {
    SensorConfig config;
    for (double radiance : {0.3, 0.6, 0.9}) {
        const LinearImage fused = direct_fuse(synthesize_static_mosaic(LinearImage(16, 8, 3, radiance), config), config);
        for (double v : fused.data()) EXPECT_NEAR(v, radiance, 1e-12);
    }
}

TEST(DirectFuse, ConvexCombinationOfCandidates) {
    std::mt19937_64 rng(2);
    SensorConfig config;
    const LinearImage mosaic = fixtures::random_image(16, 8, 3, rng);
    const ExposurePair halves = deinterleave(mosaic, config.layout);
    const LinearImage low = bicubic_upsample_2x(halves.low, 0);
    const LinearImage high = bicubic_upsample_2x(halves.high, 1);
    const LinearImage fused = direct_fuse(mosaic, config);
    for (std::size_t i = 0; i < fused.size(); ++i) {
        const double l = std::clamp(low.data()[i], 0.0, 1.0);
        const double h = std::clamp(high.data()[i], 0.0, 1.0) / 4.0;
        EXPECT_GE(fused.data()[i], std::min(l, h) - 1e-15);
        EXPECT_LE(fused.data()[i], std::max(l, h) + 1e-15);
    }
}

TEST(GroundTruth, Examples) {
    const QuantizedReading r(4, 2, 1, 12, {}, 1000);
    const std::vector<QuantizedReading> same(3, r);
    const LinearImage avg = ground_truth_average(same, nullptr, 8.0);
    for (double v : avg.data()) EXPECT_NEAR(v, 1000.0 / 4095.0, 1e-15);

    const QuantizedReading clipped(4, 2, 1, 12, {}, 4095);
    EXPECT_EQ(ground_truth_average(same, &clipped, 8.0), avg);

    const QuantizedReading bright(4, 2, 1, 12, {}, 2000);
    const LinearImage gt = ground_truth_average(same, &bright, 8.0);
    for (double v : gt.data()) EXPECT_NEAR(v, 2000.0 / 4095.0 / 8.0, 1e-15);

    EXPECT_THROW(ground_truth_average(std::vector<QuantizedReading>(1, r), nullptr, 8.0), Error);
}

TEST(GroundTruth, NoiseShrinksAsRootN) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 20.0);
    const std::size_t pixels = 4000;
    auto spread = [&](std::size_t n) {
        std::vector<QuantizedReading> captures;
        for (std::size_t k = 0; k < n; ++k) {
            QuantizedReading q(pixels, 1, 1, 12);
            for (auto& v : q.data()) v = static_cast<std::uint16_t>(std::lround(2000.0 + noise(rng)));
            captures.push_back(q);
        }
        const LinearImage gt = ground_truth_average(captures, nullptr, 1.0);
        double sq = 0.0;
        for (double v : gt.data()) sq += (v * 4095.0 - 2000.0) * (v * 4095.0 - 2000.0);
        return std::sqrt(sq / static_cast<double>(pixels));
    };
    const double s4 = spread(4);
    const double s64 = spread(64);
    EXPECT_NEAR(s4 / s64, 4.0, 0.4);
}
