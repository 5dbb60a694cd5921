#include "hdrdist/rowcol_noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdrdist/error.hpp"
#include "hdrdist/parallel.hpp"
#include "hdrdist/random.hpp"

namespace hdrdist {
namespace {

constexpr int kShiftGridExponent = -52;

struct LineGeometry {
    std::size_t lines;
    std::size_t length;
};

template <typename Image>
LineGeometry geometry(const Image& image, LineAxis axis) {
    return axis == LineAxis::Row ? LineGeometry{image.height(), image.width()}
                                 : LineGeometry{image.width(), image.height()};
}

struct Site {
    std::size_t x;
    std::size_t y;
};

Site site_on_line(LineAxis axis, std::size_t line, std::size_t i) {
    return axis == LineAxis::Row ? Site{i, line} : Site{line, i};
}

// Per-class sums over one line, index c * 2 + e.
struct ClassSums {
    std::vector<double> sum;
    std::vector<std::size_t> count;

    explicit ClassSums(std::size_t channels)
        : sum(channels * kExposureCount, 0.0), count(channels * kExposureCount, 0) {}

    double mean(std::size_t k) const { return sum[k] / static_cast<double>(count[k]); }
};

template <typename Image>
ClassSums line_sums(const Image& image, const ExposureLayout& layout, LineAxis axis, std::size_t line) {
    ClassSums sums(image.channels());
    const std::size_t length = geometry(image, axis).length;
    for (std::size_t i = 0; i < length; ++i) {
        const Site s = site_on_line(axis, line, i);
        const auto e = static_cast<std::size_t>(layout.exposure_at(s.x, s.y));
        for (std::size_t c = 0; c < image.channels(); ++c) {
            sums.sum[c * kExposureCount + e] += static_cast<double>(image.at(s.x, s.y, c));
            ++sums.count[c * kExposureCount + e];
        }
    }
    return sums;
}

std::uint32_t grid_index(double mean_code, std::uint32_t top) {
    return static_cast<std::uint32_t>(std::clamp(std::round(mean_code), 0.0, static_cast<double>(top)));
}

} // namespace

HistogramSet accumulate_line_histograms(std::span<const ReadingPair> pairs, LineAxis axis, std::size_t workers) {
    if (pairs.empty()) fail(ErrorCode::EmptyModel, "no reading pairs to accumulate");
    const std::size_t channels = pairs.front().clean.channels();
    const int bit_depth = pairs.front().clean.bit_depth();
    for (const ReadingPair& pair : pairs) {
        check_pair(pair);
        if (pair.clean.channels() != channels) fail(ErrorCode::SizeMismatch, "pairs differ in channel count");
        if (pair.clean.bit_depth() != bit_depth) fail(ErrorCode::BitDepthMismatch, "pairs differ in bit depth");
    }

    std::vector<HistogramSet> partials(pairs.size(), HistogramSet(channels, bit_depth));
    parallel_for(pairs.size(), workers, [&](std::size_t p) {
        const ReadingPair& pair = pairs[p];
        const std::uint32_t top = pair.clean.max_value();
        const ExposureLayout& layout = pair.clean.layout();
        for (std::size_t line = 0; line < geometry(pair.clean, axis).lines; ++line) {
            const ClassSums clean = line_sums(pair.clean, layout, axis, line);
            const ClassSums sensed = line_sums(pair.distorted, layout, axis, line);
            for (std::size_t c = 0; c < channels; ++c) {
                for (Exposure e : {Exposure::Low, Exposure::High}) {
                    const std::size_t k = c * kExposureCount + static_cast<std::size_t>(e);
                    if (clean.count[k] == 0) continue;
                    partials[p].at(c, e).add(grid_index(clean.mean(k), top), grid_index(sensed.mean(k), top));
                }
            }
        }
    });
    HistogramSet total(channels, bit_depth);
    for (const HistogramSet& part : partials) total.merge(part);
    return total;
}

RowColNoiseModel build_rowcol_model(const HistogramSet& histograms, LineAxis axis) {
    RowColNoiseModel model;
    model.axis = axis;
    model.bit_depth = histograms.bit_depth();
    model.channels = histograms.channels();
    for (std::size_t c = 0; c < model.channels; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            if (histograms.at(c, e).total() == 0) {
                fail(ErrorCode::EmptyModel, "no line means for channel " + std::to_string(c) + ", exposure " +
                                                (e == Exposure::Low ? "low" : "high"));
            }
            model.tables.push_back(CumulativeTable::from_histogram(histograms.at(c, e)));
        }
    }
    return model;
}

RowColNoiseModel estimate_rowcol_model(std::span<const ReadingPair> pairs, LineAxis axis, std::size_t workers) {
    return build_rowcol_model(accumulate_line_histograms(pairs, axis, workers), axis);
}

LinearImage apply_rowcol_noise(const LinearImage& image, const RowColNoiseModel& model, const SensorConfig& config,
                               std::uint64_t seed, std::uint32_t image_id, std::size_t workers) {
    if (model.tables.empty()) fail(ErrorCode::EmptyModel, "row/column noise model has no tables");
    if (model.bit_depth != config.bit_depth) {
        fail(ErrorCode::BitDepthMismatch, "row/column model bit depth differs from sensor bit depth");
    }
    if (model.channels != image.channels()) fail(ErrorCode::SizeMismatch, "model channel count differs from image");
    check_radiance(image);

    const std::uint32_t top = config.max_value();
    const LineAxis axis = model.axis;
    const LineGeometry geo = geometry(image, axis);
    const std::uint32_t lane_base = axis == LineAxis::Row ? 0U : 16U;
    LinearImage out = image;
    parallel_for(geo.lines, workers, [&](std::size_t line) {
        const ClassSums sums = line_sums(image, config.layout, axis, line);
        std::vector<double> shift(sums.sum.size(), 0.0);
        for (std::size_t c = 0; c < image.channels(); ++c) {
            for (Exposure e : {Exposure::Low, Exposure::High}) {
                const std::size_t k = c * kExposureCount + static_cast<std::size_t>(e);
                if (sums.count[k] == 0) continue;
                const double current = sums.mean(k);
                const std::uint32_t clean_index = grid_index(current * top, top);
                const SiteRandom draw(seed, Stream::RowColNoise, image_id, static_cast<std::uint32_t>(line),
                                      lane_base + static_cast<std::uint32_t>(k));
                const double target =
                    static_cast<double>(model.table(c, e).sample(clean_index, draw.uniform())) / static_cast<double>(top);
                shift[k] = std::ldexp(std::round(std::ldexp(target - current, -kShiftGridExponent)), kShiftGridExponent);
            }
        }
        for (std::size_t i = 0; i < geo.length; ++i) {
            const Site s = site_on_line(axis, line, i);
            const auto e = static_cast<std::size_t>(config.layout.exposure_at(s.x, s.y));
            for (std::size_t c = 0; c < image.channels(); ++c) {
                double& v = out.at(s.x, s.y, c);
                v = std::clamp(v + shift[c * kExposureCount + e], 0.0, 1.0);
            }
        }
    });
    return out;
}

LevelVariance level_variance(const HistogramSet& histograms) {
    // Rounding alone contributes 1/12; keeps every weight finite.
    constexpr double kFloor = 1.0 / 12.0;
    LevelVariance out;
    for (std::size_t c = 0; c < histograms.channels(); ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            const ConditionalHistogram& h = histograms.at(c, e);
            const std::size_t levels = static_cast<std::size_t>(h.max_value()) + 1;
            std::vector<double> var(levels, -1.0);
            for (std::uint32_t y = 0; y <= h.max_value(); ++y) {
                const auto& row = h.row(y);
                double n = 0.0, sum = 0.0, squares = 0.0;
                for (std::size_t i = 0; i < row.counts.size(); ++i) {
                    const auto k = static_cast<double>(row.counts[i]);
                    const auto x = static_cast<double>(row.x_min + i);
                    n += k;
                    sum += k * x;
                    squares += k * x * x;
                }
                if (n >= 2.0) var[y] = std::max(kFloor, squares / n - (sum / n) * (sum / n));
            }
            // Fill gaps from the nearest populated level, ties toward the lower one.
            std::vector<std::ptrdiff_t> below(levels, -1), above(levels, -1);
            for (std::size_t y = 0; y < levels; ++y) {
                below[y] = var[y] >= 0.0 ? static_cast<std::ptrdiff_t>(y) : (y > 0 ? below[y - 1] : -1);
            }
            for (std::size_t y = levels; y-- > 0;) {
                above[y] = var[y] >= 0.0 ? static_cast<std::ptrdiff_t>(y) : (y + 1 < levels ? above[y + 1] : -1);
            }
            std::vector<double> filled(levels, 1.0); // no populated level at all: uniform weights
            for (std::size_t y = 0; y < levels; ++y) {
                const auto at = static_cast<std::ptrdiff_t>(y);
                std::ptrdiff_t source = below[y];
                if (source < 0 || (above[y] >= 0 && above[y] - at < at - source)) source = above[y];
                if (source >= 0) filled[y] = var[static_cast<std::size_t>(source)];
            }
            out.table.push_back(std::move(filled));
        }
    }
    return out;
}

QuantizedReading remove_line_offsets(const ReadingPair& pair, LineAxis axis, const LevelVariance* variance) {
    check_pair(pair);
    if (variance != nullptr && variance->table.size() != pair.clean.channels() * kExposureCount) {
        fail(ErrorCode::SizeMismatch, "level variances do not match the reading's channels");
    }
    QuantizedReading out = pair.distorted;
    const auto top = static_cast<double>(pair.clean.max_value());
    const ExposureLayout& layout = pair.clean.layout();
    const LineGeometry geo = geometry(pair.clean, axis);
    const std::size_t classes = pair.clean.channels() * kExposureCount;
    auto weight = [&](std::size_t c, Exposure e, std::uint16_t level) {
        return variance == nullptr ? 1.0 : 1.0 / variance->at(c, e, level);
    };
    for (std::size_t line = 0; line < geo.lines; ++line) {
        std::vector<double> total(classes, 0.0), weighted(classes, 0.0);
        for (std::size_t i = 0; i < geo.length; ++i) {
            const Site s = site_on_line(axis, line, i);
            const Exposure e = layout.exposure_at(s.x, s.y);
            for (std::size_t c = 0; c < out.channels(); ++c) {
                const std::size_t k = c * kExposureCount + static_cast<std::size_t>(e);
                const double w = weight(c, e, pair.clean.at(s.x, s.y, c));
                total[k] += w;
                weighted[k] += w * (static_cast<double>(pair.distorted.at(s.x, s.y, c)) - pair.clean.at(s.x, s.y, c));
            }
        }
        for (std::size_t i = 0; i < geo.length; ++i) {
            const Site s = site_on_line(axis, line, i);
            const Exposure e = layout.exposure_at(s.x, s.y);
            for (std::size_t c = 0; c < out.channels(); ++c) {
                const std::size_t k = c * kExposureCount + static_cast<std::size_t>(e);
                const double x = pair.distorted.at(s.x, s.y, c);
                double offset = weighted[k] / total[k];
                if (variance != nullptr) {
                    const double w = weight(c, e, pair.clean.at(s.x, s.y, c)) / 2.0;
                    offset = (weighted[k] - w * (x - pair.clean.at(s.x, s.y, c))) / (total[k] - w);
                }
                out.at(s.x, s.y, c) = static_cast<std::uint16_t>(std::clamp(std::round(x - offset), 0.0, top));
            }
        }
    }
    return out;
}

const RowColNoiseModel& find_rowcol_model(std::span<const RowColNoiseModel> models, LineAxis axis) {
    for (const RowColNoiseModel& m : models) {
        if (m.axis == axis) return m;
    }
    fail(ErrorCode::AxisMismatch, std::string("no row/column model for the ") +
                                      (axis == LineAxis::Row ? "row" : "column") + " axis");
}

} // namespace hdrdist
