#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hdrdist {

enum class Exposure : std::uint8_t { Low = 0, High = 1 };
inline constexpr std::size_t kExposureCount = 2;

enum class InterleaveAxis : std::uint8_t { Column = 0, Row = 1 };

// Which scanlines carry which exposure on a dual-exposure sensor. The
// default matches a column-interleaved sensor with Low on even columns.
struct ExposureLayout {
    InterleaveAxis axis = InterleaveAxis::Column;
    bool low_on_even = true;

    Exposure exposure_at(std::size_t x, std::size_t y) const noexcept {
        const std::size_t line = axis == InterleaveAxis::Column ? x : y;
        const bool even = (line & 1U) == 0;
        return even == low_on_even ? Exposure::Low : Exposure::High;
    }

    bool operator==(const ExposureLayout&) const = default;
};

// Row-major, channel-interleaved radiance image. Samples are held in double
// precision; values read from or written to float formats stay exact.
class LinearImage {
public:
    LinearImage() = default;
    LinearImage(std::size_t width, std::size_t height, std::size_t channels, double fill = 0.0);
    LinearImage(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(std::size_t x, std::size_t y, std::size_t c) noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const LinearImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    bool operator==(const LinearImage&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

// Integer sensor samples at a fixed bit depth, tagged with the exposure
// layout that assigns each column (or row) to Low or High.
class QuantizedReading {
public:
    QuantizedReading() = default;
    QuantizedReading(std::size_t width, std::size_t height, std::size_t channels, int bit_depth,
                     ExposureLayout layout = {}, std::uint16_t fill = 0);
    QuantizedReading(std::size_t width, std::size_t height, std::size_t channels, int bit_depth,
                     ExposureLayout layout, std::vector<std::uint16_t> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    int bit_depth() const noexcept { return bit_depth_; }
    std::uint32_t max_value() const noexcept { return (1U << bit_depth_) - 1U; }
    const ExposureLayout& layout() const noexcept { return layout_; }

    std::uint16_t& at(std::size_t x, std::size_t y, std::size_t c) noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }
    std::uint16_t at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }
    Exposure exposure_at(std::size_t x, std::size_t y) const noexcept { return layout_.exposure_at(x, y); }

    std::span<std::uint16_t> data() noexcept { return data_; }
    std::span<const std::uint16_t> data() const noexcept { return data_; }

    bool same_shape(const QuantizedReading& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    bool operator==(const QuantizedReading&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    int bit_depth_ = 12;
    ExposureLayout layout_{};
    std::vector<std::uint16_t> data_;
};

// Which frame of the burst window the low exposure corresponds to. With End
// the low and high exposures finish together.
enum class Alignment : std::uint8_t { Start, End };

struct SensorConfig {
    int bit_depth = 12;
    double exposure_ratio = 4.0;
    int burst_length = 4;
    double gamma = 2.2;
    ExposureLayout layout{};
    Alignment alignment = Alignment::End;

    std::uint32_t max_value() const noexcept { return (1U << bit_depth) - 1U; }
    // Throws InvalidArgument when a field is outside its domain.
    void validate() const;
};

struct ExposurePair {
    LinearImage low;
    LinearImage high;
};

std::uint32_t max_value_for(int bit_depth);

// Sample-level conversions shared by every module. dequantize_sample rounds
// to float precision so dequantized images are exactly representable in PFM.
std::uint16_t quantize_sample(double value, std::uint32_t max_value) noexcept;
double dequantize_sample(std::uint32_t sample, std::uint32_t max_value) noexcept;

LinearImage linearize(const LinearImage& display, double gamma);
QuantizedReading quantize(const LinearImage& image, int bit_depth, ExposureLayout layout = {});
LinearImage dequantize(const QuantizedReading& reading);

LinearImage interleave(const ExposurePair& pair, ExposureLayout layout = {});
ExposurePair deinterleave(const LinearImage& mosaic, ExposureLayout layout = {});

// Throws NonFiniteInput / OutOfRange when a sample is not finite or not >= 0.
void check_radiance(const LinearImage& image);

} // namespace hdrdist
