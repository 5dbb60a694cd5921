#include "hdrdist/image.hpp"

#include <cmath>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::OddWidth: return "OddWidth";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::UnsupportedMaxVal: return "UnsupportedMaxVal";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::TooFewReadings: return "TooFewReadings";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::BitDepthMismatch: return "BitDepthMismatch";
    case ErrorCode::EmptyModel: return "EmptyModel";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::InsufficientBins: return "InsufficientBins";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingPath: return "MissingPath";
    case ErrorCode::DuplicateSplit: return "DuplicateSplit";
    case ErrorCode::PatchTooLarge: return "PatchTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

namespace {

void check_channels(std::size_t channels) {
    if (channels != 1 && channels != 3) {
        fail(ErrorCode::InvalidArgument, "images have 1 or 3 channels, got " + std::to_string(channels));
    }
}

void check_bit_depth(int bit_depth) {
    if (bit_depth < 8 || bit_depth > 16) {
        fail(ErrorCode::InvalidArgument, "bit depth must lie in [8, 16], got " + std::to_string(bit_depth));
    }
}

} // namespace

LinearImage::LinearImage(std::size_t width, std::size_t height, std::size_t channels, double fill)
    : width_(width), height_(height), channels_(channels), data_(width * height * channels, fill) {
    check_channels(channels);
}

LinearImage::LinearImage(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_channels(channels);
    if (data_.size() != width * height * channels) {
        fail(ErrorCode::SizeMismatch, "payload holds " + std::to_string(data_.size()) + " samples, expected " +
                                          std::to_string(width * height * channels));
    }
}

QuantizedReading::QuantizedReading(std::size_t width, std::size_t height, std::size_t channels, int bit_depth,
                                   ExposureLayout layout, std::uint16_t fill)
    : width_(width), height_(height), channels_(channels), bit_depth_(bit_depth), layout_(layout),
      data_(width * height * channels, fill) {
    check_channels(channels);
    check_bit_depth(bit_depth);
    if (fill > max_value()) {
        fail(ErrorCode::OutOfRange, "fill value exceeds 2^B - 1");
    }
}

QuantizedReading::QuantizedReading(std::size_t width, std::size_t height, std::size_t channels, int bit_depth,
                                   ExposureLayout layout, std::vector<std::uint16_t> data)
    : width_(width), height_(height), channels_(channels), bit_depth_(bit_depth), layout_(layout),
      data_(std::move(data)) {
    check_channels(channels);
    check_bit_depth(bit_depth);
    if (data_.size() != width * height * channels) {
        fail(ErrorCode::SizeMismatch, "payload holds " + std::to_string(data_.size()) + " samples, expected " +
                                          std::to_string(width * height * channels));
    }
    const std::uint32_t top = max_value();
    for (std::uint16_t s : data_) {
        if (s > top) {
            fail(ErrorCode::OutOfRange, "sample " + std::to_string(s) + " exceeds 2^B - 1 = " + std::to_string(top));
        }
    }
}

void SensorConfig::validate() const {
    check_bit_depth(bit_depth);
    if (!(exposure_ratio >= 1.0) || !std::isfinite(exposure_ratio)) {
        fail(ErrorCode::InvalidArgument, "exposure ratio must be >= 1");
    }
    if (burst_length < 1) {
        fail(ErrorCode::InvalidArgument, "burst length must be >= 1");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        fail(ErrorCode::InvalidArgument, "gamma must be > 0");
    }
}

std::uint32_t max_value_for(int bit_depth) {
    check_bit_depth(bit_depth);
    return (1U << bit_depth) - 1U;
}

std::uint16_t quantize_sample(double value, std::uint32_t max_value) noexcept {
    // std::round rounds halfway cases away from zero.
    const double scaled = std::round(value * static_cast<double>(max_value));
    if (scaled <= 0.0) return 0;
    if (scaled >= static_cast<double>(max_value)) return static_cast<std::uint16_t>(max_value);
    return static_cast<std::uint16_t>(scaled);
}

double dequantize_sample(std::uint32_t sample, std::uint32_t max_value) noexcept {
    return static_cast<float>(static_cast<double>(sample) / static_cast<double>(max_value));
}

void check_radiance(const LinearImage& image) {
    for (double v : image.data()) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "image contains a non-finite sample");
        if (v < 0.0) fail(ErrorCode::OutOfRange, "image contains a negative sample");
    }
}

LinearImage linearize(const LinearImage& display, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        fail(ErrorCode::InvalidArgument, "gamma must be > 0");
    }
    LinearImage out(display.width(), display.height(), display.channels());
    auto src = display.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = src[i];
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "display image contains a non-finite sample");
        if (v < 0.0 || v > 1.0) fail(ErrorCode::OutOfRange, "display values must lie in [0, 1]");
        dst[i] = std::pow(v, gamma);
    }
    return out;
}

QuantizedReading quantize(const LinearImage& image, int bit_depth, ExposureLayout layout) {
    const std::uint32_t top = max_value_for(bit_depth);
    std::vector<std::uint16_t> samples(image.size());
    auto src = image.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = src[i];
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "cannot quantize a non-finite sample");
        if (v < 0.0 || v > 1.0) fail(ErrorCode::OutOfRange, "quantize expects values in [0, 1]");
        samples[i] = quantize_sample(v, top);
    }
    return QuantizedReading(image.width(), image.height(), image.channels(), bit_depth, layout, std::move(samples));
}

LinearImage dequantize(const QuantizedReading& reading) {
    const std::uint32_t top = reading.max_value();
    std::vector<double> values(reading.size());
    auto src = reading.data();
    for (std::size_t i = 0; i < src.size(); ++i) values[i] = dequantize_sample(src[i], top);
    return LinearImage(reading.width(), reading.height(), reading.channels(), std::move(values));
}

LinearImage interleave(const ExposurePair& pair, ExposureLayout layout) {
    const LinearImage& low = pair.low;
    const LinearImage& high = pair.high;
    if (!low.same_shape(high)) {
        fail(ErrorCode::SizeMismatch, "low and high subimages differ in shape");
    }
    const bool by_column = layout.axis == InterleaveAxis::Column;
    const std::size_t width = by_column ? low.width() * 2 : low.width();
    const std::size_t height = by_column ? low.height() : low.height() * 2;
    const std::size_t channels = low.channels();
    LinearImage out(width, height, channels);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const LinearImage& src = layout.exposure_at(x, y) == Exposure::Low ? low : high;
            const std::size_t sx = by_column ? x / 2 : x;
            const std::size_t sy = by_column ? y : y / 2;
            for (std::size_t c = 0; c < channels; ++c) out.at(x, y, c) = src.at(sx, sy, c);
        }
    }
    return out;
}

ExposurePair deinterleave(const LinearImage& mosaic, ExposureLayout layout) {
    const bool by_column = layout.axis == InterleaveAxis::Column;
    const std::size_t extent = by_column ? mosaic.width() : mosaic.height();
    if (extent % 2 != 0) {
        fail(ErrorCode::OddWidth, std::string("mosaic ") + (by_column ? "width" : "height") + " " +
                                      std::to_string(extent) + " is not even");
    }
    const std::size_t width = by_column ? mosaic.width() / 2 : mosaic.width();
    const std::size_t height = by_column ? mosaic.height() : mosaic.height() / 2;
    const std::size_t channels = mosaic.channels();
    ExposurePair pair{LinearImage(width, height, channels), LinearImage(width, height, channels)};
    for (std::size_t y = 0; y < mosaic.height(); ++y) {
        for (std::size_t x = 0; x < mosaic.width(); ++x) {
            LinearImage& dst = layout.exposure_at(x, y) == Exposure::Low ? pair.low : pair.high;
            const std::size_t dx = by_column ? x / 2 : x;
            const std::size_t dy = by_column ? y : y / 2;
            for (std::size_t c = 0; c < channels; ++c) dst.at(dx, dy, c) = mosaic.at(x, y, c);
        }
    }
    return pair;
}

} // namespace hdrdist
