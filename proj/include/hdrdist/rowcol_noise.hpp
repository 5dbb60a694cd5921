#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdrdist/histogram.hpp"
#include "hdrdist/image.hpp"
#include "hdrdist/noise_model.hpp"

namespace hdrdist {

enum class LineAxis : std::uint8_t { Row = 0, Column = 1 };

// Conditional distribution of a line's sensor mean given its clean mean,
// one table per (channel, exposure). Means live on the 2^B grid over [0, 1].
struct RowColNoiseModel {
    LineAxis axis = LineAxis::Row;
    int bit_depth = 12;
    std::size_t channels = 3;
    std::vector<CumulativeTable> tables; // index c * 2 + e

    const CumulativeTable& table(std::size_t c, Exposure e) const {
        return tables.at(c * kExposureCount + static_cast<std::size_t>(e));
    }

    bool operator==(const RowColNoiseModel&) const = default;
};

// Histogram of (clean line mean, sensor line mean) grid indices.
HistogramSet accumulate_line_histograms(std::span<const ReadingPair> pairs, LineAxis axis, std::size_t workers = 1);

// Throws EmptyModel naming the first (channel, exposure) without lines.
RowColNoiseModel build_rowcol_model(const HistogramSet& line_histograms, LineAxis axis);

RowColNoiseModel estimate_rowcol_model(std::span<const ReadingPair> pairs, LineAxis axis, std::size_t workers = 1);

// Shifts each line's per-class mean to a target drawn from the model. The
// shift is snapped to a multiple of 2^-52: any sum below 2 of such multiples
// is a double, so samples that are themselves multiples of 2^-52 (every
// dequantized reading) move exactly and within-line differences survive.
LinearImage apply_rowcol_noise(const LinearImage& image, const RowColNoiseModel& model, const SensorConfig& config,
                               std::uint64_t seed, std::uint32_t image_id = 0, std::size_t workers = 1);

// Variance of the sensed value at each clean level of every (c, e) class.
// Levels without two observations borrow the nearest populated level.
struct LevelVariance {
    std::vector<std::vector<double>> table; // index c * 2 + e, then level

    double at(std::size_t c, Exposure e, std::uint32_t level) const {
        return table.at(c * kExposureCount + static_cast<std::size_t>(e)).at(level);
    }
};

LevelVariance level_variance(const HistogramSet& histograms);

// Distorted reading with the line component of the noise removed. Without
// variances every line's per-class mean is moved onto the clean mean. With
// them, each pixel's offset is the inverse-variance weighted mean of the
// line's sensed-minus-clean differences with the pixel itself at half
// weight; the estimate's own noise and its covariance with the pixel then
// cancel, so the residual keeps the pixel's variance to first order.
QuantizedReading remove_line_offsets(const ReadingPair& pair, LineAxis axis, const LevelVariance* variance = nullptr);

// Throws AxisMismatch when no model has the requested axis.
const RowColNoiseModel& find_rowcol_model(std::span<const RowColNoiseModel> models, LineAxis axis);

} // namespace hdrdist
