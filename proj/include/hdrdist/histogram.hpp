#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Sparse conditional histogram H[y][x]: for every conditioning value y a
// contiguous count array over observed values x starting at x_min. Dense
// semantics: count(y, x) is zero outside the stored range.
class ConditionalHistogram {
public:
    struct Row {
        std::uint32_t x_min = 0;
        std::vector<std::uint64_t> counts;

        bool operator==(const Row&) const = default;
    };

    explicit ConditionalHistogram(int bit_depth = 12);

    int bit_depth() const noexcept { return bit_depth_; }
    std::uint32_t max_value() const noexcept { return (1U << bit_depth_) - 1U; }

    void add(std::uint32_t y, std::uint32_t x, std::uint64_t count = 1);
    void merge(const ConditionalHistogram& other);

    std::uint64_t count(std::uint32_t y, std::uint32_t x) const noexcept;
    std::uint64_t row_total(std::uint32_t y) const noexcept;
    std::uint64_t total() const noexcept { return total_; }
    std::size_t populated_rows() const noexcept;
    const Row& row(std::uint32_t y) const { return rows_.at(y); }

    bool operator==(const ConditionalHistogram&) const = default;

private:
    int bit_depth_;
    std::vector<Row> rows_;
    std::uint64_t total_ = 0;
};

// One histogram per (channel, exposure).
class HistogramSet {
public:
    HistogramSet(std::size_t channels, int bit_depth);

    std::size_t channels() const noexcept { return channels_; }
    int bit_depth() const noexcept { return bit_depth_; }

    ConditionalHistogram& at(std::size_t c, Exposure e) { return histograms_.at(c * kExposureCount + index(e)); }
    const ConditionalHistogram& at(std::size_t c, Exposure e) const {
        return histograms_.at(c * kExposureCount + index(e));
    }

    void merge(const HistogramSet& other);

    bool operator==(const HistogramSet&) const = default;

private:
    static std::size_t index(Exposure e) noexcept { return static_cast<std::size_t>(e); }

    std::size_t channels_;
    int bit_depth_;
    std::vector<ConditionalHistogram> histograms_;
};

// Inverse cumulative table for one (channel, exposure): per populated y the
// cumulative probabilities over x in [x_min, x_min + size). The final entry
// of every row is exactly 1.
class CumulativeTable {
public:
    struct Row {
        std::uint16_t y = 0;
        std::uint16_t x_min = 0;
        std::vector<float> cumulative;

        bool operator==(const Row&) const = default;
    };

    CumulativeTable() = default;
    CumulativeTable(int bit_depth, std::vector<Row> rows);

    // Throws EmptyModel when the histogram holds no observations.
    static CumulativeTable from_histogram(const ConditionalHistogram& histogram);

    int bit_depth() const noexcept { return bit_depth_; }
    std::uint32_t max_value() const noexcept { return (1U << bit_depth_) - 1U; }
    const std::vector<Row>& rows() const noexcept { return rows_; }

    // Row for y, or the nearest populated row (ties toward lower y).
    const Row& nearest_row(std::uint32_t y) const;

    // Smallest x with cumulative(x) > xi. Unpopulated y borrows the nearest
    // row and shifts the result by the distance, clamped to [0, 2^B - 1].
    std::uint32_t sample(std::uint32_t y, double xi) const;

    bool operator==(const CumulativeTable&) const = default;

private:
    int bit_depth_ = 12;
    std::vector<Row> rows_;
};

} // namespace hdrdist
