#include "hdrdist/blur.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {
namespace {

void check_window(const FrameStack& stack, std::size_t start, std::size_t length) {
    if (length == 0 || start >= stack.frames.size() || stack.frames.size() - start < length) {
        fail(ErrorCode::IndexOutOfBounds, "window [" + std::to_string(start) + ", " +
                                              std::to_string(start + length) + ") exceeds stack of " +
                                              std::to_string(stack.frames.size()) + " frames");
    }
    const LinearImage& first = stack.frames[start];
    for (std::size_t i = start + 1; i < start + length; ++i) {
        if (!stack.frames[i].same_shape(first)) fail(ErrorCode::SizeMismatch, "frames in a stack differ in shape");
    }
}

} // namespace

std::size_t low_frame_index(std::size_t start, const SensorConfig& config) {
    return config.alignment == Alignment::End ? start + static_cast<std::size_t>(config.burst_length) - 1 : start;
}

LinearImage simulate_low_frame(const FrameStack& stack, std::size_t index) {
    check_window(stack, index, 1);
    return stack.frames[index];
}

LinearImage simulate_high_frame(const FrameStack& stack, std::size_t start, double ratio, int burst_length) {
    if (burst_length < 1) fail(ErrorCode::InvalidArgument, "burst length must be >= 1");
    if (!(ratio >= 1.0)) fail(ErrorCode::InvalidArgument, "exposure ratio must be >= 1");
    const auto n = static_cast<std::size_t>(burst_length);
    check_window(stack, start, n);

    const LinearImage& first = stack.frames[start];
    LinearImage out(first.width(), first.height(), first.channels());
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        // Neumaier compensated sum in frame order.
        double sum = 0.0;
        double compensation = 0.0;
        for (std::size_t k = start; k < start + n; ++k) {
            const double v = stack.frames[k].data()[i];
            const double t = sum + v;
            compensation += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        const double mean = (sum + compensation) / static_cast<double>(n);
        dst[i] = std::min(1.0, ratio * mean);
    }
    return out;
}

LinearImage compose_mosaic(const LinearImage& low, const LinearImage& high, ExposureLayout layout) {
    if (!low.same_shape(high)) fail(ErrorCode::SizeMismatch, "low and high exposures differ in shape");
    LinearImage out(low.width(), low.height(), low.channels());
    for (std::size_t y = 0; y < low.height(); ++y) {
        for (std::size_t x = 0; x < low.width(); ++x) {
            const LinearImage& src = layout.exposure_at(x, y) == Exposure::Low ? low : high;
            for (std::size_t c = 0; c < low.channels(); ++c) out.at(x, y, c) = src.at(x, y, c);
        }
    }
    return out;
}

LinearImage synthesize_mb_mosaic(const FrameStack& stack, std::size_t start, const SensorConfig& config) {
    config.validate();
    const LinearImage high = simulate_high_frame(stack, start, config.exposure_ratio, config.burst_length);
    const LinearImage low = simulate_low_frame(stack, low_frame_index(start, config));
    return compose_mosaic(low, high, config.layout);
}

LinearImage synthesize_static_mosaic(const LinearImage& frame, const SensorConfig& config) {
    config.validate();
    LinearImage high(frame.width(), frame.height(), frame.channels());
    auto src = frame.data();
    auto dst = high.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::min(1.0, config.exposure_ratio * src[i]);
    return compose_mosaic(frame, high, config.layout);
}

} // namespace hdrdist
