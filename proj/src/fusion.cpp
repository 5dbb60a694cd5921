#include "hdrdist/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {

void FusionWeights::validate() const {
    if (!(0.0 <= low_floor && low_floor < high_ceiling && high_ceiling <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "fusion weights need 0 <= low_floor < high_ceiling <= 1");
    }
}

double FusionWeights::weight(double value) const noexcept {
    if (value <= low_floor || value >= high_ceiling) return 0.0;
    return std::min(value - low_floor, high_ceiling - value);
}

double catmull_rom(double distance) noexcept {
    constexpr double a = -0.5;
    const double d = std::abs(distance);
    if (d <= 1.0) return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0;
    if (d < 2.0) return ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a;
    return 0.0;
}

LinearImage bicubic_upsample_2x(const LinearImage& half, std::size_t phase, InterleaveAxis axis) {
    if (phase > 1) fail(ErrorCode::InvalidArgument, "phase must be 0 or 1");
    const bool by_column = axis == InterleaveAxis::Column;
    const std::size_t n = by_column ? half.width() : half.height();
    const std::size_t width = by_column ? half.width() * 2 : half.width();
    const std::size_t height = by_column ? half.height() : half.height() * 2;
    const std::size_t channels = half.channels();
    LinearImage out(width, height, channels);
    if (n == 0) return out;

    auto sample = [&](std::ptrdiff_t j, std::size_t x, std::size_t y, std::size_t c) {
        const auto idx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 1));
        return by_column ? half.at(idx, y, c) : half.at(x, idx, c);
    };

    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t u = by_column ? x : y;
            const std::size_t sx = by_column ? 0 : x;
            const std::size_t sy = by_column ? y : 0;
            if (u % 2 == phase) {
                for (std::size_t c = 0; c < channels; ++c) {
                    out.at(x, y, c) = by_column ? half.at(u / 2, y, c) : half.at(x, u / 2, c);
                }
                continue;
            }
            const double s = (static_cast<double>(u) - static_cast<double>(phase)) / 2.0;
            const auto j0 = static_cast<std::ptrdiff_t>(std::floor(s));
            for (std::size_t c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (std::ptrdiff_t j = j0 - 1; j <= j0 + 2; ++j) {
                    acc += catmull_rom(s - static_cast<double>(j)) * sample(j, sx, sy, c);
                }
                out.at(x, y, c) = acc;
            }
        }
    }
    return out;
}

LinearImage direct_fuse(const LinearImage& mosaic, const SensorConfig& config, const FusionWeights& weights) {
    config.validate();
    weights.validate();
    check_radiance(mosaic);
    const ExposurePair halves = deinterleave(mosaic, config.layout);
    const std::size_t low_phase = config.layout.low_on_even ? 0 : 1;
    const LinearImage low = bicubic_upsample_2x(halves.low, low_phase, config.layout.axis);
    const LinearImage high = bicubic_upsample_2x(halves.high, 1 - low_phase, config.layout.axis);

    LinearImage out(mosaic.width(), mosaic.height(), mosaic.channels());
    auto lo = low.data();
    auto hi = high.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        // Interpolation overshoot is clipped to the sensor range.
        const double l = std::clamp(lo[i], 0.0, 1.0);
        const double h = std::clamp(hi[i], 0.0, 1.0);
        const double wl = weights.weight(l);
        const double wh = weights.weight(h);
        const double total = wl + wh;
        dst[i] = total > 0.0 ? (wl * l + wh * (h / config.exposure_ratio)) / total : l;
    }
    return out;
}

LinearImage ground_truth_average(std::span<const QuantizedReading> low_captures, const QuantizedReading* long_capture,
                                 double long_ratio, const FusionWeights& weights) {
    if (low_captures.size() < 2) {
        fail(ErrorCode::TooFewReadings, "ground truth needs at least 2 low captures, got " +
                                            std::to_string(low_captures.size()));
    }
    weights.validate();
    const QuantizedReading& first = low_captures.front();
    for (const QuantizedReading& r : low_captures) {
        if (!r.same_shape(first)) fail(ErrorCode::SizeMismatch, "low captures differ in shape");
    }
    if (long_capture != nullptr) {
        if (!long_capture->same_shape(first)) fail(ErrorCode::SizeMismatch, "long capture is not aligned with the low captures");
        if (!(long_ratio >= 1.0)) fail(ErrorCode::InvalidArgument, "long exposure ratio must be >= 1");
    }

    LinearImage out(first.width(), first.height(), first.channels());
    auto dst = out.data();
    for (const QuantizedReading& r : low_captures) {
        const auto top = static_cast<double>(r.max_value());
        auto src = r.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += static_cast<double>(src[i]) / top;
    }
    const auto n = static_cast<double>(low_captures.size());
    for (double& v : dst) v /= n;

    if (long_capture != nullptr) {
        const auto top = static_cast<double>(long_capture->max_value());
        auto src = long_capture->data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double v = static_cast<double>(src[i]) / top;
            if (v < weights.high_ceiling) dst[i] = v / long_ratio;
        }
    }
    return out;
}

} // namespace hdrdist
