#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hdrdist/error.hpp"
#include "hdrdist/rowcol_noise.hpp"
#include "support.hpp"

using namespace hdrdist;

namespace {

// Line model where every clean mean maps to mean + offset codes.
RowColNoiseModel shifted_model(LineAxis axis, int offset, std::size_t channels = 3) {
    HistogramSet set(channels, 12);
    for (std::size_t c = 0; c < channels; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            for (std::uint32_t y = 0; y < 4096; ++y) {
                set.at(c, e).add(y, static_cast<std::uint32_t>(std::clamp<int>(static_cast<int>(y) + offset, 0, 4095)));
            }
        }
    }
    return build_rowcol_model(set, axis);
}

double line_class_mean(const LinearImage& img, std::size_t row, std::size_t c, Exposure e, const ExposureLayout& layout) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t x = 0; x < img.width(); ++x) {
        if (layout.exposure_at(x, row) != e) continue;
        sum += img.at(x, row, c);
        ++n;
    }
    return sum / static_cast<double>(n);
}

} // namespace

TEST(RowColEstimate, DiagonalWhenSensorEqualsClean) {
    std::mt19937_64 rng(1);
    std::vector<ReadingPair> pairs;
    for (int i = 0; i < 3; ++i) {
        const QuantizedReading r = fixtures::random_reading(16, 8, 3, 12, rng);
        pairs.push_back({r, r});
    }
    const RowColNoiseModel m = estimate_rowcol_model(pairs, LineAxis::Row);
    for (const CumulativeTable& t : m.tables) {
        for (const auto& row : t.rows()) {
            EXPECT_EQ(row.x_min, row.y);
            EXPECT_EQ(row.cumulative, std::vector<float>{1.0f});
        }
    }
}

TEST(RowColEstimate, HandTally) {
    // One row, one channel; low class mean 98 clean and 100 sensed.
    QuantizedReading clean(2, 1, 1, 12), sensed(2, 1, 1, 12);
    clean.at(0, 0, 0) = 98;
    sensed.at(0, 0, 0) = 100;
    clean.at(1, 0, 0) = 7;
    sensed.at(1, 0, 0) = 7;
    const ReadingPair pair{clean, sensed};
    const HistogramSet h = accumulate_line_histograms(std::span<const ReadingPair>(&pair, 1), LineAxis::Row);
    EXPECT_EQ(h.at(0, Exposure::Low).total(), 1u);
    EXPECT_EQ(h.at(0, Exposure::Low).count(98, 100), 1u);
    EXPECT_EQ(h.at(0, Exposure::High).count(7, 7), 1u);
}

TEST(RowColEstimate, PermutationInvariant) {
    std::mt19937_64 rng(2);
    std::vector<ReadingPair> pairs;
    for (int i = 0; i < 4; ++i) pairs.push_back({fixtures::random_reading(8, 8, 1, 12, rng), fixtures::random_reading(8, 8, 1, 12, rng)});
    const HistogramSet a = accumulate_line_histograms(pairs, LineAxis::Column);
    std::swap(pairs[0], pairs[3]);
    EXPECT_EQ(accumulate_line_histograms(pairs, LineAxis::Column, 4), a);
}

TEST(RowColEstimate, ZeroPairs) {
    try {
        estimate_rowcol_model({}, LineAxis::Row);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyModel);
    }
}

TEST(RowColApply, ShiftsEveryPixelOfTheClassByTheSameAmount) {
    std::mt19937_64 rng(3);
    SensorConfig config;
    const LinearImage in = dequantize(quantize(fixtures::random_image(32, 6, 3, rng, 0.2, 0.8), 12));
    const LinearImage out = apply_rowcol_noise(in, shifted_model(LineAxis::Row, 82), config, 9);
    for (std::size_t y = 0; y < in.height(); ++y) {
        for (std::size_t c = 0; c < 3; ++c) {
            for (Exposure e : {Exposure::Low, Exposure::High}) {
                const double target = std::round(line_class_mean(in, y, c, e, config.layout) * 4095.0) + 82.0;
                EXPECT_NEAR(line_class_mean(out, y, c, e, config.layout), target / 4095.0, 1e-13);
                double shift = std::nan("");
                for (std::size_t x = 0; x < in.width(); ++x) {
                    if (config.layout.exposure_at(x, y) != e) continue;
                    const double d = out.at(x, y, c) - in.at(x, y, c);
                    if (std::isnan(shift)) shift = d;
                    EXPECT_EQ(d, shift);
                }
            }
        }
    }
}

TEST(RowColApply, DiagonalModelMovesMeanOntoGrid) {
    std::mt19937_64 rng(4);
    SensorConfig config;
    const LinearImage in = dequantize(quantize(fixtures::random_image(16, 4, 1, rng, 0.2, 0.8), 12));
    const LinearImage out = apply_rowcol_noise(in, shifted_model(LineAxis::Row, 0, 1), config, 1);
    for (std::size_t y = 0; y < 4; ++y) {
        const double before = line_class_mean(in, y, 0, Exposure::Low, config.layout);
        const double after = line_class_mean(out, y, 0, Exposure::Low, config.layout);
        EXPECT_LE(std::abs(after - before), 0.5 / 4095.0 + 1e-12);
    }
}

TEST(RowColApply, ColumnAxisAndDeterminism) {
    std::mt19937_64 rng(5);
    SensorConfig config;
    const LinearImage in = dequantize(quantize(fixtures::random_image(8, 40, 3, rng, 0.1, 0.9), 12));
    HistogramSet set(3, 12);
    for (std::size_t c = 0; c < 3; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            for (std::uint32_t y = 0; y < 4096; ++y) {
                for (int d = -4; d <= 4; ++d) set.at(c, e).add(y, static_cast<std::uint32_t>(std::clamp<int>(y + d, 0, 4095)));
            }
        }
    }
    const RowColNoiseModel model = build_rowcol_model(set, LineAxis::Column);
    const LinearImage a = apply_rowcol_noise(in, model, config, 11, 2, 1);
    EXPECT_EQ(apply_rowcol_noise(in, model, config, 11, 2, 8), a);
    EXPECT_NE(apply_rowcol_noise(in, model, config, 12, 2, 1), a);
    // Each column holds one exposure class, so its pixels move together.
    for (std::size_t x = 0; x < 8; ++x) {
        const double d0 = a.at(x, 0, 1) - in.at(x, 0, 1);
        for (std::size_t y = 1; y < 40; ++y) EXPECT_EQ(a.at(x, y, 1) - in.at(x, y, 1), d0);
    }
}

TEST(RowColApply, ClampsToUnitRange) {
    SensorConfig config;
    const LinearImage in(8, 2, 1, 0.99);
    const LinearImage out = apply_rowcol_noise(in, shifted_model(LineAxis::Row, 400, 1), config, 1);
    for (double v : out.data()) EXPECT_EQ(v, 1.0);
}

TEST(RowColRemove, RestoresCleanLineMeans) {
    QuantizedReading clean(4, 2, 1, 12, {}, 100), sensed(4, 2, 1, 12, {}, 100);
    for (std::size_t x = 0; x < 4; ++x) sensed.at(x, 1, 0) = static_cast<std::uint16_t>(110 + x);
    const QuantizedReading fixed = remove_line_offsets({clean, sensed}, LineAxis::Row);
    EXPECT_EQ(fixed.at(0, 1, 0), 99);
    EXPECT_EQ(fixed.at(2, 1, 0), 101);
    EXPECT_EQ(fixed.at(1, 1, 0), 99);
    EXPECT_EQ(fixed.at(3, 1, 0), 101);
    EXPECT_EQ(fixed.at(0, 0, 0), 100);
}

TEST(RowColFind, AxisMismatch) {
    std::vector<RowColNoiseModel> models{shifted_model(LineAxis::Row, 0, 1)};
    EXPECT_EQ(&find_rowcol_model(models, LineAxis::Row), &models[0]);
    try {
        find_rowcol_model(models, LineAxis::Column);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AxisMismatch);
    }
}

TEST(LevelVariance, NearestPopulatedLevelAndFloor) {
    HistogramSet set(1, 12);
    ConditionalHistogram& h = set.at(0, Exposure::Low);
    h.add(10, 8);
    h.add(10, 12);
    h.add(20, 20, 5);
    h.add(30, 31);
    const LevelVariance v = level_variance(set);
    EXPECT_EQ(v.at(0, Exposure::Low, 10), 4.0);
    EXPECT_EQ(v.at(0, Exposure::Low, 20), 1.0 / 12.0);
    EXPECT_EQ(v.at(0, Exposure::Low, 0), 4.0);
    EXPECT_EQ(v.at(0, Exposure::Low, 15), 4.0); // tie goes low
    EXPECT_EQ(v.at(0, Exposure::Low, 16), 1.0 / 12.0);
    EXPECT_EQ(v.at(0, Exposure::Low, 30), 1.0 / 12.0); // one observation is not enough
    EXPECT_EQ(v.at(0, Exposure::Low, 4095), 1.0 / 12.0);
    EXPECT_EQ(v.at(0, Exposure::High, 7), 1.0);
}

TEST(RowColRemove, WeightedOffsetsHalveTheOwnPixel) {
    QuantizedReading clean(4, 1, 1, 12, {}, 100), sensed(4, 1, 1, 12, {}, 100);
    sensed.at(0, 0, 0) = 110;
    sensed.at(2, 0, 0) = 114;
    LevelVariance flat;
    flat.table.assign(2, std::vector<double>(4096, 1.0));
    const QuantizedReading fixed = remove_line_offsets({clean, sensed}, LineAxis::Row, &flat);
    // Offsets (24 - 10 / 2) / 1.5 and (24 - 14 / 2) / 1.5.
    EXPECT_EQ(fixed.at(0, 0, 0), 97);
    EXPECT_EQ(fixed.at(2, 0, 0), 103);
    EXPECT_EQ(fixed.at(1, 0, 0), 100);

    LevelVariance wrong;
    wrong.table.assign(4, std::vector<double>(4096, 1.0));
    EXPECT_THROW(remove_line_offsets({clean, sensed}, LineAxis::Row, &wrong), Error);
}

TEST(RowColRemove, WeightedResidualKeepsPixelVariance) {
    // Rows mixing a dark and a bright level, with a random offset per row.
    std::mt19937_64 rng(21);
    std::normal_distribution<double> unit;
    auto law = [](double y) { return 0.5 * y + 10.0; };
    const std::size_t width = 128, rows = 2000;
    QuantizedReading clean(width, rows, 1, 12), sensed(width, rows, 1, 12);
    for (std::size_t y = 0; y < rows; ++y) {
        const double offset = 4.0 * unit(rng);
        for (std::size_t x = 0; x < width; ++x) {
            const double level = (x / 2) % 2 == 0 ? 60.0 : 2000.0;
            clean.at(x, y, 0) = static_cast<std::uint16_t>(level);
            sensed.at(x, y, 0) = static_cast<std::uint16_t>(std::lround(level + offset + std::sqrt(law(level)) * unit(rng)));
        }
    }
    LevelVariance truth;
    truth.table.assign(2, std::vector<double>(4096));
    for (auto& t : truth.table) {
        for (std::size_t y = 0; y < t.size(); ++y) t[y] = law(static_cast<double>(y));
    }
    auto dark_variance = [&](const QuantizedReading& r) {
        double n = 0.0, s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (clean.data()[i] != 60) continue;
            const double d = r.data()[i];
            n += 1.0;
            s += d;
            s2 += d * d;
        }
        return s2 / n - (s / n) * (s / n);
    };
    const double expected = law(60.0) + 2.0 / 12.0; // two roundings
    const double weighted = dark_variance(remove_line_offsets({clean, sensed}, LineAxis::Row, &truth));
    const double uniform = dark_variance(remove_line_offsets({clean, sensed}, LineAxis::Row));
    EXPECT_NEAR(weighted, expected, 0.04 * expected);
    // Plain line means leak the line's average noise into every pixel:
    // sigma^2 (1 - 2 / n) + mean(sigma^2) / n over n = 64 samples per class.
    const double leaked = law(60.0) * (1.0 - 2.0 / 64.0) + (law(60.0) + law(2000.0)) / 2.0 / 64.0 + 2.0 / 12.0;
    EXPECT_NEAR(uniform, leaked, 0.04 * leaked);
    EXPECT_GT(uniform, 1.1 * expected);
}
