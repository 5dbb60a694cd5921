#pragma once

#include <cstdint>
#include <optional>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Parametric sensor with a known noise law, in quantized units:
// x = round(s + N(0, sqrt(gain * s + read_noise)) + row offset), clamped,
// where s = clean * exposure scale * (2^B - 1).
struct VirtualSensorParams {
    double gain = 0.0;
    double read_noise = 0.0;
    double row_sigma = 0.0;
    double exposure_ratio = 4.0;
    int bit_depth = 12;
    // When set every pixel uses this exposure's scale instead of the layout.
    std::optional<Exposure> single_exposure;

    double scale(Exposure e) const noexcept { return e == Exposure::High ? exposure_ratio : 1.0; }
};

// Noise-free reading: round(clean * scale * max), clamped.
QuantizedReading virtual_clean_reading(const LinearImage& clean, const VirtualSensorParams& params,
                                       ExposureLayout layout = {});

// Row offsets are drawn per (row, channel) and shared by both exposures.
QuantizedReading virtual_sensor(const LinearImage& clean, const VirtualSensorParams& params, ExposureLayout layout,
                                std::uint64_t seed, std::uint32_t image_id = 0);

} // namespace hdrdist
