#include "hdrdist/noise_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hdrdist/error.hpp"
#include "hdrdist/parallel.hpp"
#include "hdrdist/random.hpp"

namespace hdrdist {
namespace {

const char* exposure_name(Exposure e) { return e == Exposure::Low ? "low" : "high"; }

// Mean sample of each (channel, exposure) class, index c * 2 + e.
std::vector<double> class_means(const QuantizedReading& reading) {
    const std::size_t classes = reading.channels() * kExposureCount;
    std::vector<double> sums(classes, 0.0);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t y = 0; y < reading.height(); ++y) {
        for (std::size_t x = 0; x < reading.width(); ++x) {
            const auto e = static_cast<std::size_t>(reading.exposure_at(x, y));
            for (std::size_t c = 0; c < reading.channels(); ++c) {
                sums[c * kExposureCount + e] += reading.at(x, y, c);
                ++counts[c * kExposureCount + e];
            }
        }
    }
    for (std::size_t i = 0; i < classes; ++i) {
        if (counts[i] > 0) sums[i] /= static_cast<double>(counts[i]);
    }
    return sums;
}

} // namespace

FixedPatternMap::FixedPatternMap(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> offsets)
    : width_(width), height_(height), channels_(channels), offsets_(std::move(offsets)) {
    if (offsets_.size() != width * height * channels) fail(ErrorCode::SizeMismatch, "fixed-pattern payload size mismatch");
    for (double v : offsets_) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "fixed-pattern offsets must be finite");
    }
}

FixedPatternMap estimate_fixed_pattern(std::span<const QuantizedReading> calibration) {
    if (calibration.size() < 2) {
        fail(ErrorCode::TooFewReadings, "fixed-pattern estimation needs at least 2 readings, got " +
                                            std::to_string(calibration.size()));
    }
    const QuantizedReading& first = calibration.front();
    for (const QuantizedReading& r : calibration) {
        if (!r.same_shape(first)) fail(ErrorCode::SizeMismatch, "calibration readings differ in shape");
        if (!(r.layout() == first.layout())) fail(ErrorCode::LayoutMismatch, "calibration readings differ in layout");
    }

    std::vector<double> offsets(first.size(), 0.0);
    for (const QuantizedReading& r : calibration) {
        const std::vector<double> means = class_means(r);
        for (std::size_t y = 0; y < r.height(); ++y) {
            for (std::size_t x = 0; x < r.width(); ++x) {
                const auto e = static_cast<std::size_t>(r.exposure_at(x, y));
                for (std::size_t c = 0; c < r.channels(); ++c) {
                    offsets[(y * r.width() + x) * r.channels() + c] += r.at(x, y, c) - means[c * kExposureCount + e];
                }
            }
        }
    }
    const auto n = static_cast<double>(calibration.size());
    for (double& v : offsets) v /= n;
    return FixedPatternMap(first.width(), first.height(), first.channels(), std::move(offsets));
}

QuantizedReading remove_fixed_pattern(const QuantizedReading& reading, const FixedPatternMap& map) {
    if (reading.width() != map.width() || reading.height() != map.height() || reading.channels() != map.channels()) {
        fail(ErrorCode::SizeMismatch, "fixed-pattern map does not match the reading");
    }
    QuantizedReading out = reading;
    const auto top = static_cast<double>(reading.max_value());
    auto dst = out.data();
    auto offsets = map.offsets();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double corrected = std::round(static_cast<double>(dst[i]) - offsets[i]);
        dst[i] = static_cast<std::uint16_t>(std::clamp(corrected, 0.0, top));
    }
    return out;
}

void check_pair(const ReadingPair& pair) {
    if (!pair.clean.same_shape(pair.distorted)) fail(ErrorCode::SizeMismatch, "clean and distorted readings differ in shape");
    if (pair.clean.bit_depth() != pair.distorted.bit_depth()) {
        fail(ErrorCode::BitDepthMismatch, "clean and distorted readings differ in bit depth");
    }
    if (!(pair.clean.layout() == pair.distorted.layout())) {
        fail(ErrorCode::LayoutMismatch, "clean and distorted readings differ in exposure layout");
    }
}

HistogramSet accumulate_histograms(std::span<const ReadingPair> pairs, std::size_t workers) {
    if (pairs.empty()) fail(ErrorCode::EmptyModel, "no reading pairs to accumulate");
    const std::size_t channels = pairs.front().clean.channels();
    const int bit_depth = pairs.front().clean.bit_depth();
    for (const ReadingPair& pair : pairs) {
        check_pair(pair);
        if (pair.clean.channels() != channels) fail(ErrorCode::SizeMismatch, "pairs differ in channel count");
        if (pair.clean.bit_depth() != bit_depth) fail(ErrorCode::BitDepthMismatch, "pairs differ in bit depth");
    }

    // Per-pair partials merged by integer addition: identical for any schedule.
    std::vector<HistogramSet> partials(pairs.size(), HistogramSet(channels, bit_depth));
    parallel_for(pairs.size(), workers, [&](std::size_t i) {
        const QuantizedReading& clean = pairs[i].clean;
        const QuantizedReading& distorted = pairs[i].distorted;
        HistogramSet& set = partials[i];
        for (std::size_t y = 0; y < clean.height(); ++y) {
            for (std::size_t x = 0; x < clean.width(); ++x) {
                const Exposure e = clean.exposure_at(x, y);
                for (std::size_t c = 0; c < channels; ++c) set.at(c, e).add(clean.at(x, y, c), distorted.at(x, y, c));
            }
        }
    });
    HistogramSet total(channels, bit_depth);
    for (const HistogramSet& part : partials) total.merge(part);
    return total;
}

PixelNoiseModel build_inverse_cumulative(const HistogramSet& histograms, std::uint32_t pair_count) {
    PixelNoiseModel model;
    model.bit_depth = histograms.bit_depth();
    model.channels = histograms.channels();
    model.pair_count = pair_count;
    if (model.channels == 0) fail(ErrorCode::EmptyModel, "histogram set has no channels");
    for (std::size_t c = 0; c < model.channels; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            const ConditionalHistogram& h = histograms.at(c, e);
            if (h.total() == 0) {
                fail(ErrorCode::EmptyModel, "no observations for channel " + std::to_string(c) + ", exposure " +
                                                exposure_name(e));
            }
            model.tables.push_back(CumulativeTable::from_histogram(h));
        }
    }
    return model;
}

std::uint32_t sample_pixel(const PixelNoiseModel& model, std::uint32_t y, std::size_t c, Exposure e, double xi) {
    return model.table(c, e).sample(y, xi);
}

LinearImage apply_pixel_noise(const LinearImage& clean_mosaic, const PixelNoiseModel& model,
                              const SensorConfig& config, std::uint64_t seed, std::uint32_t image_id,
                              std::size_t workers) {
    if (model.tables.empty()) fail(ErrorCode::EmptyModel, "pixel noise model has no tables");
    if (model.bit_depth != config.bit_depth) {
        fail(ErrorCode::BitDepthMismatch, "model bit depth " + std::to_string(model.bit_depth) +
                                              " differs from sensor bit depth " + std::to_string(config.bit_depth));
    }
    if (model.channels != clean_mosaic.channels()) fail(ErrorCode::SizeMismatch, "model channel count differs from image");
    check_radiance(clean_mosaic);

    const std::uint32_t top = config.max_value();
    const std::size_t width = clean_mosaic.width();
    const std::size_t channels = clean_mosaic.channels();
    LinearImage out(width, clean_mosaic.height(), channels);
    parallel_for(clean_mosaic.height(), workers, [&](std::size_t y) {
        for (std::size_t x = 0; x < width; ++x) {
            const Exposure e = config.layout.exposure_at(x, y);
            const auto pixel = static_cast<std::uint32_t>(y * width + x);
            for (std::size_t c = 0; c < channels; ++c) {
                const double v = clean_mosaic.at(x, y, c);
                if (v > 1.0) fail(ErrorCode::OutOfRange, "clean mosaic values must lie in [0, 1]");
                const SiteRandom draw(seed, Stream::PixelNoise, image_id, pixel, static_cast<std::uint32_t>(c));
                const std::uint32_t sensed = model.table(c, e).sample(quantize_sample(v, top), draw.uniform());
                out.at(x, y, c) = dequantize_sample(sensed, top);
            }
        }
    });
    return out;
}

} // namespace hdrdist
