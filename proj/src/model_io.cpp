#include "hdrdist/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {
namespace {

constexpr std::array<char, 4> kMagic{'D', 'X', 'N', 'M'};
constexpr std::array<char, 4> kRowColTag{'R', 'C', 'N', 'M'};
constexpr std::array<char, 4> kMetaTag{'M', 'E', 'T', 'A'};
constexpr std::uint16_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void bytes(const std::array<char, 4>& tag) { out_.write(tag.data(), 4); }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }

private:
    void le(std::uint32_t v, int n) {
        for (int i = 0; i < n; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
    std::array<char, 4> tag() {
        std::array<char, 4> t{};
        raw(t.data(), 4);
        return t;
    }
    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return le(4); }
    float f32() { return std::bit_cast<float>(le(4)); }

private:
    void raw(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) fail(ErrorCode::TruncatedPayload, "model file ends early");
    }
    std::uint32_t le(int n) {
        std::array<unsigned char, 4> b{};
        raw(reinterpret_cast<char*>(b.data()), static_cast<std::size_t>(n));
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
        return v;
    }
    std::istream& in_;
};

void write_tables(Writer& w, const std::vector<CumulativeTable>& tables) {
    for (const CumulativeTable& table : tables) {
        w.u32(static_cast<std::uint32_t>(table.rows().size()));
        for (const CumulativeTable::Row& row : table.rows()) {
            if (row.cumulative.size() > 0xFFFF) fail(ErrorCode::InvalidArgument, "support too long for the model format");
            w.u16(row.y);
            w.u16(row.x_min);
            w.u16(static_cast<std::uint16_t>(row.cumulative.size()));
            for (float p : row.cumulative) w.f32(p);
        }
    }
}

std::vector<CumulativeTable> read_tables(Reader& r, int bit_depth, std::size_t channels) {
    std::vector<CumulativeTable> tables;
    for (std::size_t i = 0; i < channels * kExposureCount; ++i) {
        const std::uint32_t row_count = r.u32();
        if (row_count > (1U << bit_depth)) fail(ErrorCode::MalformedHeader, "too many populated rows");
        std::vector<CumulativeTable::Row> rows(row_count);
        for (CumulativeTable::Row& row : rows) {
            row.y = r.u16();
            row.x_min = r.u16();
            row.cumulative.resize(r.u16());
            for (float& p : row.cumulative) p = r.f32();
        }
        try {
            tables.emplace_back(bit_depth, std::move(rows));
        } catch (const Error& e) {
            fail(ErrorCode::MalformedHeader, std::string("invalid table in model file: ") + e.what());
        }
    }
    return tables;
}

} // namespace

void write_noise_models(std::ostream& out, const NoiseModelFile& models) {
    const PixelNoiseModel& pixel = models.pixel;
    if (pixel.tables.size() != pixel.channels * kExposureCount) {
        fail(ErrorCode::EmptyModel, "pixel model must hold one table per (channel, exposure)");
    }
    Writer w(out);
    w.bytes(kMagic);
    w.u16(kVersion);
    w.u16(static_cast<std::uint16_t>(pixel.bit_depth));
    w.u8(static_cast<std::uint8_t>(pixel.channels));
    w.u8(static_cast<std::uint8_t>(kExposureCount));
    write_tables(w, pixel.tables);
    for (const RowColNoiseModel& rc : models.rowcol) {
        if (rc.bit_depth != pixel.bit_depth || rc.channels != pixel.channels ||
            rc.tables.size() != rc.channels * kExposureCount) {
            fail(ErrorCode::InvalidArgument, "row/column model does not match the pixel model geometry");
        }
        w.bytes(kRowColTag);
        w.u8(static_cast<std::uint8_t>(rc.axis));
        write_tables(w, rc.tables);
    }
    w.bytes(kMetaTag);
    w.u32(pixel.pair_count);
}

void write_noise_models(const std::filesystem::path& path, const NoiseModelFile& models) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
    write_noise_models(out, models);
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

NoiseModelFile read_noise_models(std::istream& in) {
    Reader r(in);
    if (r.at_end()) fail(ErrorCode::MalformedHeader, "empty model file");
    if (r.tag() != kMagic) fail(ErrorCode::MalformedHeader, "not a DXNM model file");
    if (const std::uint16_t version = r.u16(); version != kVersion) {
        fail(ErrorCode::MalformedHeader, "unsupported model version " + std::to_string(version));
    }
    NoiseModelFile models;
    models.pixel.bit_depth = r.u16();
    models.pixel.channels = r.u8();
    const std::uint8_t exposures = r.u8();
    if (models.pixel.bit_depth < 8 || models.pixel.bit_depth > 16 || models.pixel.channels == 0 ||
        exposures != kExposureCount) {
        fail(ErrorCode::MalformedHeader, "bad model geometry");
    }
    models.pixel.tables = read_tables(r, models.pixel.bit_depth, models.pixel.channels);
    while (!r.at_end()) {
        const auto tag = r.tag();
        if (tag == kRowColTag) {
            RowColNoiseModel rc;
            const std::uint8_t axis = r.u8();
            if (axis > 1) fail(ErrorCode::MalformedHeader, "bad row/column axis byte");
            rc.axis = static_cast<LineAxis>(axis);
            rc.bit_depth = models.pixel.bit_depth;
            rc.channels = models.pixel.channels;
            rc.tables = read_tables(r, rc.bit_depth, rc.channels);
            models.rowcol.push_back(std::move(rc));
        } else if (tag == kMetaTag) {
            models.pixel.pair_count = r.u32();
        } else {
            fail(ErrorCode::MalformedHeader, "unknown section tag '" + std::string(tag.data(), 4) + "'");
        }
    }
    return models;
}

NoiseModelFile read_noise_models(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    return read_noise_models(in);
}

} // namespace hdrdist
