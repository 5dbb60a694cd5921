#include "hdrdist/estimation.hpp"

#include <vector>

#include "hdrdist/error.hpp"
#include "hdrdist/parallel.hpp"

namespace hdrdist {

EstimatedModels estimate_noise_models(std::span<const ReadingPair> pairs,
                                      std::span<const QuantizedReading> calibration,
                                      const EstimationOptions& options) {
    if (pairs.empty()) fail(ErrorCode::EmptyModel, "no reading pairs to estimate from");

    std::optional<FixedPatternMap> fixed_pattern;
    std::vector<ReadingPair> corrected(pairs.begin(), pairs.end());
    if (!calibration.empty()) {
        fixed_pattern = estimate_fixed_pattern(calibration);
        parallel_for(corrected.size(), options.workers, [&](std::size_t i) {
            corrected[i].distorted = remove_fixed_pattern(corrected[i].distorted, *fixed_pattern);
        });
    }

    HistogramSet line_histograms = accumulate_line_histograms(corrected, options.axis, options.workers);
    RowColNoiseModel rowcol = build_rowcol_model(line_histograms, options.axis);

    if (options.separate_line_noise) {
        // First pass with plain line means supplies the per-level variances
        // that weight the second pass.
        std::vector<ReadingPair> flattened = corrected;
        parallel_for(corrected.size(), options.workers, [&](std::size_t i) {
            flattened[i].distorted = remove_line_offsets(corrected[i], options.axis);
        });
        const LevelVariance variance = level_variance(accumulate_histograms(flattened, options.workers));
        parallel_for(corrected.size(), options.workers, [&](std::size_t i) {
            corrected[i].distorted = remove_line_offsets(corrected[i], options.axis, &variance);
        });
    }
    HistogramSet pixel_histograms = accumulate_histograms(corrected, options.workers);

    EstimatedModels out{NoiseModelFile{build_inverse_cumulative(pixel_histograms, static_cast<std::uint32_t>(pairs.size())),
                                       {std::move(rowcol)}},
                        std::move(pixel_histograms), std::move(line_histograms), std::move(fixed_pattern)};
    return out;
}

} // namespace hdrdist
