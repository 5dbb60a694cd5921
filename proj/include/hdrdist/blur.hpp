#pragma once

#include <cstddef>
#include <vector>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Linearized frames of a high-speed clip, all the same shape.
struct FrameStack {
    std::vector<LinearImage> frames;
    double nominal_rate = 240.0;
};

// Index of the frame used as the low exposure for a window starting at
// `start`: the first frame for Alignment::Start, the last for Alignment::End.
std::size_t low_frame_index(std::size_t start, const SensorConfig& config);

LinearImage simulate_low_frame(const FrameStack& stack, std::size_t index);

// min(1, ratio * mean(frames[start .. start + burst_length - 1])).
LinearImage simulate_high_frame(const FrameStack& stack, std::size_t start, double ratio, int burst_length);

// Takes each pixel from the low or high exposure according to the layout.
LinearImage compose_mosaic(const LinearImage& low, const LinearImage& high, ExposureLayout layout);

// Motion-blurred dual-exposure mosaic for the window starting at `start`.
LinearImage synthesize_mb_mosaic(const FrameStack& stack, std::size_t start, const SensorConfig& config);

// Mosaic of a single sharp frame against its own exposure-scaled copy.
LinearImage synthesize_static_mosaic(const LinearImage& frame, const SensorConfig& config);

} // namespace hdrdist
