#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hdrdist/histogram.hpp"
#include "hdrdist/image.hpp"

namespace hdrdist {

// Var(L) per quantized reference level L. Levels absent from the reference,
// or observed fewer than twice, are undefined (NaN), never zero.
struct VarianceCurve {
    Exposure mode = Exposure::Low;
    std::vector<double> variance;
    std::vector<std::uint32_t> count;

    bool defined(std::size_t level) const;
};

enum class VarianceCenter : std::uint8_t {
    SampleMean, // population variance about the pixel's own mean
    Reference,  // mean squared deviation from the reference radiance
};

struct VarianceOptions {
    VarianceCenter center = VarianceCenter::SampleMean;
    // Reading units per reference code, used by VarianceCenter::Reference.
    double reference_scale = 1.0;
};

// For every level L in the reference, picks the first sample (row-major,
// channel-interleaved) whose reference value is L and measures the spread of
// that sample across all readings.
VarianceCurve variance_by_radiance(std::span<const QuantizedReading> readings, const QuantizedReading& reference,
                                   Exposure mode, const VarianceOptions& options = {});
VarianceCurve variance_by_radiance(std::span<const LinearImage> readings, const QuantizedReading& reference,
                                   Exposure mode, const VarianceOptions& options = {});

// Each output is the mean (in code units) of `tuple_size` distinct readings
// drawn at random per tuple.
std::vector<LinearImage> simulate_burst_fusion(std::span<const QuantizedReading> low_readings,
                                               std::size_t tuple_count, std::uint64_t seed,
                                               std::size_t tuple_size = 4);

// Common radiance scale: low readings map to [0, r], high readings to [0, 1].
std::vector<LinearImage> normalize_exposures(std::span<const QuantizedReading> readings, Exposure mode, double ratio);

// Rounded per-sample mean of the readings.
QuantizedReading mean_reading(std::span<const QuantizedReading> readings);

struct PilotOptions {
    double exposure_ratio = 4.0;
    std::size_t tuple_count = 0; // 0: one tuple per low reading
    std::size_t tuple_size = 4;
    std::uint64_t seed = 0;
    VarianceCenter center = VarianceCenter::Reference;
};

struct PilotResult {
    QuantizedReading reference;
    VarianceCurve low;
    VarianceCurve high;
};

// Variance against radiance for a low-exposure burst (fused in tuples) and a
// single high exposure of the same static scene, both on the common scale.
PilotResult run_pilot(std::span<const QuantizedReading> low_readings, std::span<const QuantizedReading> high_readings,
                      const PilotOptions& options);

// Writes `L variance count` for every defined level.
void write_variance_table(std::ostream& out, const VarianceCurve& curve);

struct HetGaussParams {
    double slope = 0.0;
    double intercept = 0.0;
};

// sigma^2(y) = slope * y + intercept per (channel, exposure), quantized units.
struct HetGaussFit {
    int bit_depth = 12;
    std::size_t channels = 3;
    std::vector<HetGaussParams> params; // index c * 2 + e

    const HetGaussParams& at(std::size_t c, Exposure e) const {
        return params.at(c * kExposureCount + static_cast<std::size_t>(e));
    }
};

// Least squares of the empirical Var(x | y) against y over bins holding at
// least two observations. Starts count-weighted, then reweights each bin by
// n / sigma^4 from the current fit for a few passes.
HetGaussFit fit_hetgauss(const HistogramSet& histograms);

// Baseline sampler: x ~ Normal(y, sigma(y)), rounded and clamped.
LinearImage apply_hetgauss_noise(const LinearImage& clean_mosaic, const HetGaussFit& fit, const SensorConfig& config,
                                 std::uint64_t seed, std::uint32_t image_id = 0, std::size_t workers = 1);

void write_hetgauss_table(std::ostream& out, const HetGaussFit& fit);

} // namespace hdrdist
