#pragma once

#include <cstddef>
#include <span>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Hat weighting over normalized sensor values: zero at or below low_floor
// and at or above high_ceiling, rising linearly toward the middle.
struct FusionWeights {
    double low_floor = 0.02;
    double high_ceiling = 0.98;

    void validate() const;
    double weight(double value) const noexcept;
};

// Catmull-Rom (a = -0.5) kernel.
double catmull_rom(double distance) noexcept;

// Doubles the interleave axis of a half-resolution exposure. Known samples
// land on output lines 2j + phase unchanged; the others are interpolated
// from four neighbours with indices clamped at the borders.
LinearImage bicubic_upsample_2x(const LinearImage& half, std::size_t phase,
                                InterleaveAxis axis = InterleaveAxis::Column);

// Non-learned baseline: deinterleave, upsample both exposures, align the
// high exposure by 1/r and blend with hat weights evaluated on the raw
// (pre-alignment) values. Output is in low-exposure units.
LinearImage direct_fuse(const LinearImage& mosaic, const SensorConfig& config, const FusionWeights& weights = {});

// Clean reference from a static scene: the mean of the low captures,
// replaced by long / long_ratio wherever the long capture is below the
// weights' high ceiling. long_capture may be null.
LinearImage ground_truth_average(std::span<const QuantizedReading> low_captures, const QuantizedReading* long_capture,
                                 double long_ratio, const FusionWeights& weights = {});

} // namespace hdrdist
