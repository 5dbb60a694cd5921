#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdrdist/histogram.hpp"
#include "hdrdist/image.hpp"

namespace hdrdist {

// Static per-pixel offsets in quantized units, residuals about the mean of
// each (channel, exposure) class.
class FixedPatternMap {
public:
    FixedPatternMap() = default;
    FixedPatternMap(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> offsets);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    double at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
        return offsets_[(y * width_ + x) * channels_ + c];
    }
    std::span<const double> offsets() const noexcept { return offsets_; }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> offsets_;
};

FixedPatternMap estimate_fixed_pattern(std::span<const QuantizedReading> calibration);
QuantizedReading remove_fixed_pattern(const QuantizedReading& reading, const FixedPatternMap& map);

// A noise-free reference reading and the sensor reading of the same scene.
struct ReadingPair {
    QuantizedReading clean;
    QuantizedReading distorted;
};

// Throws SizeMismatch / LayoutMismatch / BitDepthMismatch for inconsistent pairs.
void check_pair(const ReadingPair& pair);

// Tallies counts[c][e][y = clean][x = distorted] over every pixel of every pair.
HistogramSet accumulate_histograms(std::span<const ReadingPair> pairs, std::size_t workers = 1);

struct PixelNoiseModel {
    int bit_depth = 12;
    std::size_t channels = 3;
    std::vector<CumulativeTable> tables; // index c * 2 + e
    std::uint32_t pair_count = 0;

    const CumulativeTable& table(std::size_t c, Exposure e) const {
        return tables.at(c * kExposureCount + static_cast<std::size_t>(e));
    }

    bool operator==(const PixelNoiseModel&) const = default;
};

// Throws EmptyModel naming the first (channel, exposure) without observations.
PixelNoiseModel build_inverse_cumulative(const HistogramSet& histograms, std::uint32_t pair_count = 0);

std::uint32_t sample_pixel(const PixelNoiseModel& model, std::uint32_t y, std::size_t c, Exposure e, double xi);

// Replaces every sample v by a sensor value drawn from p(x | quantize(v)).
// The draw for (image_id, pixel, channel) is keyed on the seed alone.
LinearImage apply_pixel_noise(const LinearImage& clean_mosaic, const PixelNoiseModel& model,
                              const SensorConfig& config, std::uint64_t seed, std::uint32_t image_id = 0,
                              std::size_t workers = 1);

} // namespace hdrdist
