#include "hdrdist/histogram.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {

ConditionalHistogram::ConditionalHistogram(int bit_depth)
    : bit_depth_(bit_depth), rows_(max_value_for(bit_depth) + 1U) {}

void ConditionalHistogram::add(std::uint32_t y, std::uint32_t x, std::uint64_t count) {
    if (y > max_value() || x > max_value()) {
        fail(ErrorCode::OutOfRange, "histogram bin (" + std::to_string(y) + ", " + std::to_string(x) +
                                        ") outside [0, 2^B - 1]");
    }
    if (count == 0) return;
    Row& row = rows_[y];
    if (row.counts.empty()) {
        row.x_min = x;
        row.counts.assign(1, 0);
    } else if (x < row.x_min) {
        row.counts.insert(row.counts.begin(), row.x_min - x, 0);
        row.x_min = x;
    } else if (x >= row.x_min + row.counts.size()) {
        row.counts.resize(x - row.x_min + 1, 0);
    }
    row.counts[x - row.x_min] += count;
    total_ += count;
}

void ConditionalHistogram::merge(const ConditionalHistogram& other) {
    if (other.bit_depth_ != bit_depth_) fail(ErrorCode::BitDepthMismatch, "cannot merge histograms of different bit depth");
    for (std::uint32_t y = 0; y < rows_.size(); ++y) {
        const Row& src = other.rows_[y];
        for (std::size_t i = 0; i < src.counts.size(); ++i) {
            add(y, src.x_min + static_cast<std::uint32_t>(i), src.counts[i]);
        }
    }
}

std::uint64_t ConditionalHistogram::count(std::uint32_t y, std::uint32_t x) const noexcept {
    if (y >= rows_.size()) return 0;
    const Row& row = rows_[y];
    if (x < row.x_min || x >= row.x_min + row.counts.size()) return 0;
    return row.counts[x - row.x_min];
}

std::uint64_t ConditionalHistogram::row_total(std::uint32_t y) const noexcept {
    if (y >= rows_.size()) return 0;
    std::uint64_t sum = 0;
    for (std::uint64_t c : rows_[y].counts) sum += c;
    return sum;
}

std::size_t ConditionalHistogram::populated_rows() const noexcept {
    return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](const Row& r) {
        return std::any_of(r.counts.begin(), r.counts.end(), [](std::uint64_t c) { return c > 0; });
    }));
}

HistogramSet::HistogramSet(std::size_t channels, int bit_depth)
    : channels_(channels), bit_depth_(bit_depth), histograms_(channels * kExposureCount, ConditionalHistogram(bit_depth)) {}

void HistogramSet::merge(const HistogramSet& other) {
    if (other.channels_ != channels_) fail(ErrorCode::SizeMismatch, "cannot merge histogram sets with different channel counts");
    for (std::size_t i = 0; i < histograms_.size(); ++i) histograms_[i].merge(other.histograms_[i]);
}

CumulativeTable::CumulativeTable(int bit_depth, std::vector<Row> rows) : bit_depth_(bit_depth), rows_(std::move(rows)) {
    const std::uint32_t top = max_value_for(bit_depth);
    if (rows_.empty()) fail(ErrorCode::EmptyModel, "cumulative table has no populated rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Row& row = rows_[i];
        if (i > 0 && rows_[i - 1].y >= row.y) fail(ErrorCode::InvalidArgument, "cumulative rows must have increasing y");
        if (row.y > top || row.cumulative.empty() || row.x_min + row.cumulative.size() - 1 > top) {
            fail(ErrorCode::InvalidArgument, "cumulative row " + std::to_string(row.y) + " exceeds the value range");
        }
        if (!(row.cumulative.front() > 0.0f) || row.cumulative.back() != 1.0f ||
            !std::is_sorted(row.cumulative.begin(), row.cumulative.end())) {
            fail(ErrorCode::InvalidArgument, "cumulative row " + std::to_string(row.y) +
                                                 " must be nondecreasing, start > 0 and end at 1");
        }
    }
}

CumulativeTable CumulativeTable::from_histogram(const ConditionalHistogram& histogram) {
    std::vector<Row> rows;
    for (std::uint32_t y = 0; y <= histogram.max_value(); ++y) {
        const auto& src = histogram.row(y);
        auto first = std::find_if(src.counts.begin(), src.counts.end(), [](std::uint64_t c) { return c > 0; });
        if (first == src.counts.end()) continue;
        auto last = std::find_if(src.counts.rbegin(), src.counts.rend(), [](std::uint64_t c) { return c > 0; }).base();

        std::uint64_t total = 0;
        for (auto it = first; it != last; ++it) total += *it;
        Row row;
        row.y = static_cast<std::uint16_t>(y);
        row.x_min = static_cast<std::uint16_t>(src.x_min + (first - src.counts.begin()));
        row.cumulative.reserve(static_cast<std::size_t>(last - first));
        std::uint64_t running = 0;
        for (auto it = first; it != last; ++it) {
            running += *it;
            row.cumulative.push_back(static_cast<float>(static_cast<double>(running) / static_cast<double>(total)));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorCode::EmptyModel, "histogram has no observations");
    return CumulativeTable(histogram.bit_depth(), std::move(rows));
}

const CumulativeTable::Row& CumulativeTable::nearest_row(std::uint32_t y) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), y, [](const Row& r, std::uint32_t v) { return r.y < v; });
    if (it == rows_.end()) return rows_.back();
    if (it->y == y || it == rows_.begin()) return *it;
    auto below = std::prev(it);
    return (y - below->y) <= (it->y - y) ? *below : *it;
}

std::uint32_t CumulativeTable::sample(std::uint32_t y, double xi) const {
    const Row& row = nearest_row(y);
    auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), xi,
                               [](double v, float c) { return v < static_cast<double>(c); });
    if (it == row.cumulative.end()) --it; // xi >= 1 is outside the contract; stay total.
    const auto offset = static_cast<std::int64_t>(it - row.cumulative.begin());
    const std::int64_t x = static_cast<std::int64_t>(row.x_min) + offset + static_cast<std::int64_t>(y) -
                           static_cast<std::int64_t>(row.y);
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(x, 0, max_value()));
}

} // namespace hdrdist
