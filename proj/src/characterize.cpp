#include "hdrdist/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "hdrdist/error.hpp"
#include "hdrdist/parallel.hpp"
#include "hdrdist/random.hpp"

namespace hdrdist {
namespace {

constexpr std::size_t kNoSample = std::numeric_limits<std::size_t>::max();

template <typename Reading>
VarianceCurve variance_curve(std::span<const Reading> readings, const QuantizedReading& reference, Exposure mode,
                             const VarianceOptions& options) {
    if (readings.size() < 2) {
        fail(ErrorCode::TooFewReadings, "variance needs at least 2 readings, got " + std::to_string(readings.size()));
    }
    for (const Reading& r : readings) {
        if (r.width() != reference.width() || r.height() != reference.height() || r.channels() != reference.channels()) {
            fail(ErrorCode::SizeMismatch, "readings are not aligned with the reference");
        }
    }

    const std::size_t levels = static_cast<std::size_t>(reference.max_value()) + 1;
    std::vector<std::size_t> first(levels, kNoSample);
    auto ref = reference.data();
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (first[ref[i]] == kNoSample) first[ref[i]] = i;
    }

    VarianceCurve curve;
    curve.mode = mode;
    curve.variance.assign(levels, std::numeric_limits<double>::quiet_NaN());
    curve.count.assign(levels, 0);
    const auto n = static_cast<double>(readings.size());
    for (std::size_t level = 0; level < levels; ++level) {
        const std::size_t i = first[level];
        if (i == kNoSample) continue;
        double centre = static_cast<double>(level) * options.reference_scale;
        if (options.center == VarianceCenter::SampleMean) {
            double sum = 0.0;
            for (const Reading& r : readings) sum += static_cast<double>(r.data()[i]);
            centre = sum / n;
        }
        double squares = 0.0;
        for (const Reading& r : readings) {
            const double d = static_cast<double>(r.data()[i]) - centre;
            squares += d * d;
        }
        curve.variance[level] = squares / n;
        curve.count[level] = static_cast<std::uint32_t>(readings.size());
    }
    return curve;
}

const char* exposure_name(Exposure e) { return e == Exposure::Low ? "low" : "high"; }

struct BinVariance {
    double y;
    double variance;
    double count;
};

HetGaussParams weighted_line_fit(const std::vector<BinVariance>& bins, const std::vector<double>& weights) {
    double sw = 0.0, swy = 0.0, swyy = 0.0, swv = 0.0, swyv = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double w = weights[i];
        sw += w;
        swy += w * bins[i].y;
        swyy += w * bins[i].y * bins[i].y;
        swv += w * bins[i].variance;
        swyv += w * bins[i].y * bins[i].variance;
    }
    HetGaussParams p;
    p.slope = (sw * swyv - swy * swv) / (sw * swyy - swy * swy);
    p.intercept = (swv - p.slope * swy) / sw;
    return p;
}

// A sample variance over n draws has spread proportional to sigma^2 / sqrt(n),
// so bins are weighted by n / sigma^4 with sigma^2 taken from the previous fit.
HetGaussParams reweighted_line_fit(const std::vector<BinVariance>& bins) {
    constexpr int kPasses = 4;
    std::vector<double> weights(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) weights[i] = bins[i].count;
    HetGaussParams p = weighted_line_fit(bins, weights);
    double floor = std::numeric_limits<double>::max();
    for (const BinVariance& b : bins) {
        if (b.variance > 0.0) floor = std::min(floor, b.variance);
    }
    if (floor == std::numeric_limits<double>::max()) return p;
    for (int pass = 0; pass < kPasses; ++pass) {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double v = std::max(p.slope * bins[i].y + p.intercept, floor);
            weights[i] = bins[i].count / (v * v);
        }
        p = weighted_line_fit(bins, weights);
    }
    return p;
}

} // namespace

bool VarianceCurve::defined(std::size_t level) const {
    return level < variance.size() && count[level] >= 2 && !std::isnan(variance[level]);
}

VarianceCurve variance_by_radiance(std::span<const QuantizedReading> readings, const QuantizedReading& reference,
                                   Exposure mode, const VarianceOptions& options) {
    return variance_curve(readings, reference, mode, options);
}

VarianceCurve variance_by_radiance(std::span<const LinearImage> readings, const QuantizedReading& reference,
                                   Exposure mode, const VarianceOptions& options) {
    return variance_curve(readings, reference, mode, options);
}

std::vector<LinearImage> simulate_burst_fusion(std::span<const QuantizedReading> low_readings,
                                               std::size_t tuple_count, std::uint64_t seed, std::size_t tuple_size) {
    if (tuple_size == 0) fail(ErrorCode::InvalidArgument, "tuple size must be positive");
    if (low_readings.size() < tuple_size) {
        fail(ErrorCode::TooFewReadings, "burst fusion needs at least " + std::to_string(tuple_size) + " readings, got " +
                                            std::to_string(low_readings.size()));
    }
    const QuantizedReading& first = low_readings.front();
    for (const QuantizedReading& r : low_readings) {
        if (!r.same_shape(first)) fail(ErrorCode::SizeMismatch, "burst readings differ in shape");
    }

    std::vector<LinearImage> fused;
    fused.reserve(tuple_count);
    std::vector<std::size_t> order(low_readings.size());
    for (std::size_t t = 0; t < tuple_count; ++t) {
        // Partial Fisher-Yates: the first tuple_size entries are a draw without replacement.
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t k = 0; k < tuple_size; ++k) {
            const SiteRandom draw(seed, Stream::BurstFusion, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(k));
            const std::size_t remaining = order.size() - k;
            const std::size_t pick = k + std::min(remaining - 1, static_cast<std::size_t>(draw.uniform() * remaining));
            std::swap(order[k], order[pick]);
        }
        LinearImage image(first.width(), first.height(), first.channels());
        auto dst = image.data();
        for (std::size_t k = 0; k < tuple_size; ++k) {
            auto src = low_readings[order[k]].data();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += static_cast<double>(src[i]);
        }
        for (double& v : dst) v /= static_cast<double>(tuple_size);
        fused.push_back(std::move(image));
    }
    return fused;
}

std::vector<LinearImage> normalize_exposures(std::span<const QuantizedReading> readings, Exposure mode, double ratio) {
    if (!(ratio >= 1.0)) fail(ErrorCode::InvalidArgument, "exposure ratio must be >= 1");
    std::vector<LinearImage> out;
    out.reserve(readings.size());
    for (const QuantizedReading& r : readings) {
        const double scale = (mode == Exposure::Low ? ratio : 1.0) / static_cast<double>(r.max_value());
        LinearImage image(r.width(), r.height(), r.channels());
        auto src = r.data();
        auto dst = image.data();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]) * scale;
        out.push_back(std::move(image));
    }
    return out;
}

QuantizedReading mean_reading(std::span<const QuantizedReading> readings) {
    if (readings.empty()) fail(ErrorCode::TooFewReadings, "mean of zero readings");
    const QuantizedReading& first = readings.front();
    std::vector<double> sums(first.size(), 0.0);
    for (const QuantizedReading& r : readings) {
        if (!r.same_shape(first)) fail(ErrorCode::SizeMismatch, "readings differ in shape");
        auto src = r.data();
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += src[i];
    }
    std::vector<std::uint16_t> samples(sums.size());
    const auto n = static_cast<double>(readings.size());
    for (std::size_t i = 0; i < sums.size(); ++i) samples[i] = static_cast<std::uint16_t>(std::round(sums[i] / n));
    return QuantizedReading(first.width(), first.height(), first.channels(), first.bit_depth(), first.layout(),
                            std::move(samples));
}

PilotResult run_pilot(std::span<const QuantizedReading> low_readings, std::span<const QuantizedReading> high_readings,
                      const PilotOptions& options) {
    if (low_readings.empty() || high_readings.size() < 2) {
        fail(ErrorCode::TooFewReadings, "pilot needs low readings and at least 2 high readings");
    }
    PilotResult result;
    result.reference = mean_reading(low_readings);
    const double ratio = options.exposure_ratio;
    const double low_scale = ratio / static_cast<double>(result.reference.max_value());

    const std::size_t tuples = options.tuple_count == 0 ? low_readings.size() : options.tuple_count;
    std::vector<LinearImage> fused = simulate_burst_fusion(low_readings, tuples, options.seed, options.tuple_size);
    for (LinearImage& image : fused) {
        for (double& v : image.data()) v *= low_scale;
    }
    const std::vector<LinearImage> high = normalize_exposures(high_readings, Exposure::High, ratio);

    const VarianceOptions variance{options.center, low_scale};
    result.low = variance_by_radiance(std::span<const LinearImage>(fused), result.reference, Exposure::Low, variance);
    result.high = variance_by_radiance(std::span<const LinearImage>(high), result.reference, Exposure::High, variance);
    return result;
}

void write_variance_table(std::ostream& out, const VarianceCurve& curve) {
    out.precision(17);
    for (std::size_t level = 0; level < curve.variance.size(); ++level) {
        if (curve.defined(level)) out << level << ' ' << curve.variance[level] << ' ' << curve.count[level] << '\n';
    }
}

HetGaussFit fit_hetgauss(const HistogramSet& histograms) {
    HetGaussFit fit;
    fit.bit_depth = histograms.bit_depth();
    fit.channels = histograms.channels();
    for (std::size_t c = 0; c < fit.channels; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            const ConditionalHistogram& h = histograms.at(c, e);
            std::vector<BinVariance> bins;
            for (std::uint32_t y = 0; y <= h.max_value(); ++y) {
                const auto& row = h.row(y);
                std::uint64_t n = 0;
                double sum = 0.0;
                for (std::size_t i = 0; i < row.counts.size(); ++i) {
                    n += row.counts[i];
                    sum += static_cast<double>(row.counts[i]) * static_cast<double>(row.x_min + i);
                }
                if (n < 2) continue;
                const double mean = sum / static_cast<double>(n);
                double squares = 0.0;
                for (std::size_t i = 0; i < row.counts.size(); ++i) {
                    const double d = static_cast<double>(row.x_min + i) - mean;
                    squares += static_cast<double>(row.counts[i]) * d * d;
                }
                bins.push_back({static_cast<double>(y), squares / static_cast<double>(n), static_cast<double>(n)});
            }
            if (bins.size() < 2) {
                fail(ErrorCode::InsufficientBins, "channel " + std::to_string(c) + ", exposure " + exposure_name(e) +
                                                      " has " + std::to_string(bins.size()) + " usable bins, need 2");
            }
            fit.params.push_back(reweighted_line_fit(bins));
        }
    }
    return fit;
}

LinearImage apply_hetgauss_noise(const LinearImage& clean_mosaic, const HetGaussFit& fit, const SensorConfig& config,
                                 std::uint64_t seed, std::uint32_t image_id, std::size_t workers) {
    if (fit.bit_depth != config.bit_depth) fail(ErrorCode::BitDepthMismatch, "fit bit depth differs from sensor bit depth");
    if (fit.channels != clean_mosaic.channels()) fail(ErrorCode::SizeMismatch, "fit channel count differs from image");
    check_radiance(clean_mosaic);
    const std::uint32_t top = config.max_value();
    const std::size_t width = clean_mosaic.width();
    LinearImage out(width, clean_mosaic.height(), clean_mosaic.channels());
    parallel_for(clean_mosaic.height(), workers, [&](std::size_t y) {
        for (std::size_t x = 0; x < width; ++x) {
            const Exposure e = config.layout.exposure_at(x, y);
            const auto pixel = static_cast<std::uint32_t>(y * width + x);
            for (std::size_t c = 0; c < clean_mosaic.channels(); ++c) {
                const double v = clean_mosaic.at(x, y, c);
                if (v > 1.0) fail(ErrorCode::OutOfRange, "clean mosaic values must lie in [0, 1]");
                const std::uint16_t level = quantize_sample(v, top);
                const HetGaussParams& p = fit.at(c, e);
                const double sigma = std::sqrt(std::max(0.0, p.slope * level + p.intercept));
                const SiteRandom draw(seed, Stream::HetGaussNoise, image_id, pixel, static_cast<std::uint32_t>(c));
                const double sensed = std::clamp(std::round(level + sigma * draw.normal()), 0.0, static_cast<double>(top));
                out.at(x, y, c) = dequantize_sample(static_cast<std::uint32_t>(sensed), top);
            }
        }
    });
    return out;
}

void write_hetgauss_table(std::ostream& out, const HetGaussFit& fit) {
    out.precision(17);
    for (std::size_t c = 0; c < fit.channels; ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            const HetGaussParams& p = fit.at(c, e);
            out << c << ' ' << exposure_name(e) << ' ' << p.slope << ' ' << p.intercept << '\n';
        }
    }
}

} // namespace hdrdist
