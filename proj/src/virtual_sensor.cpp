#include "hdrdist/virtual_sensor.hpp"

#include <algorithm>
#include <cmath>

#include "hdrdist/error.hpp"
#include "hdrdist/random.hpp"

namespace hdrdist {
namespace {

void check_params(const VirtualSensorParams& params) {
    if (!(params.gain >= 0.0) || !(params.read_noise >= 0.0) || !(params.row_sigma >= 0.0)) {
        fail(ErrorCode::InvalidArgument, "virtual sensor noise parameters must be non-negative");
    }
    if (!(params.exposure_ratio >= 1.0)) fail(ErrorCode::InvalidArgument, "exposure ratio must be >= 1");
    max_value_for(params.bit_depth);
}

double signal_of(const LinearImage& clean, const VirtualSensorParams& params, ExposureLayout layout, std::size_t x,
                 std::size_t y, std::size_t c, double top) {
    const Exposure e = params.single_exposure.value_or(layout.exposure_at(x, y));
    return clean.at(x, y, c) * params.scale(e) * top;
}

} // namespace

QuantizedReading virtual_clean_reading(const LinearImage& clean, const VirtualSensorParams& params,
                                       ExposureLayout layout) {
    check_params(params);
    check_radiance(clean);
    const double top = max_value_for(params.bit_depth);
    QuantizedReading out(clean.width(), clean.height(), clean.channels(), params.bit_depth, layout);
    for (std::size_t y = 0; y < clean.height(); ++y) {
        for (std::size_t x = 0; x < clean.width(); ++x) {
            for (std::size_t c = 0; c < clean.channels(); ++c) {
                const double s = signal_of(clean, params, layout, x, y, c, top);
                out.at(x, y, c) = static_cast<std::uint16_t>(std::clamp(std::round(s), 0.0, top));
            }
        }
    }
    return out;
}

QuantizedReading virtual_sensor(const LinearImage& clean, const VirtualSensorParams& params, ExposureLayout layout,
                                std::uint64_t seed, std::uint32_t image_id) {
    check_params(params);
    check_radiance(clean);
    const double top = max_value_for(params.bit_depth);
    QuantizedReading out(clean.width(), clean.height(), clean.channels(), params.bit_depth, layout);
    std::vector<double> row_offset(clean.channels());
    for (std::size_t y = 0; y < clean.height(); ++y) {
        for (std::size_t c = 0; c < clean.channels(); ++c) {
            const SiteRandom draw(seed, Stream::VirtualSensorLine, image_id, static_cast<std::uint32_t>(y),
                                  static_cast<std::uint32_t>(c));
            row_offset[c] = params.row_sigma * draw.normal();
        }
        for (std::size_t x = 0; x < clean.width(); ++x) {
            const auto pixel = static_cast<std::uint32_t>(y * clean.width() + x);
            for (std::size_t c = 0; c < clean.channels(); ++c) {
                const double s = signal_of(clean, params, layout, x, y, c, top);
                const SiteRandom draw(seed, Stream::VirtualSensorPixel, image_id, pixel, static_cast<std::uint32_t>(c));
                const double sigma = std::sqrt(params.gain * s + params.read_noise);
                const double noisy = s + sigma * draw.normal() + row_offset[c];
                out.at(x, y, c) = static_cast<std::uint16_t>(std::clamp(std::round(noisy), 0.0, top));
            }
        }
    }
    return out;
}

} // namespace hdrdist
