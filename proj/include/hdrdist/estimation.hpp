#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "hdrdist/model_io.hpp"

namespace hdrdist {

struct EstimationOptions {
    LineAxis axis = LineAxis::Row;
    // Remove each line's offset before tallying pixel histograms so the line
    // component is modeled once, by the row/column model. Offsets come from
    // a variance-weighted second pass (see remove_line_offsets).
    bool separate_line_noise = true;
    std::size_t workers = 1;
};

struct EstimatedModels {
    NoiseModelFile models;
    HistogramSet pixel_histograms;
    HistogramSet line_histograms;
    std::optional<FixedPatternMap> fixed_pattern;
};

// Full analysis chain over captured pairs: fixed-pattern calibration and
// removal (when calibration readings are given), row/column model, line
// offset removal, pixel histograms, inverse cumulative tables.
EstimatedModels estimate_noise_models(std::span<const ReadingPair> pairs,
                                      std::span<const QuantizedReading> calibration,
                                      const EstimationOptions& options = {});

} // namespace hdrdist
