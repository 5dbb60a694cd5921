#include "hdrdist/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hdrdist/error.hpp"

namespace hdrdist {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

// Netpbm header tokenizer: whitespace separated, '#' starts a comment that
// runs to end of line. Comments are handed to the caller.
class HeaderReader {
public:
    explicit HeaderReader(std::istream& in) : in_(in) {}

    std::string token() {
        std::string out;
        for (;;) {
            const int ch = in_.get();
            if (ch == std::char_traits<char>::eof()) break;
            if (ch == '#' && out.empty()) {
                std::string comment;
                std::getline(in_, comment);
                comments_.push_back(comment);
                continue;
            }
            if (std::isspace(ch)) {
                if (out.empty()) continue;
                break;
            }
            out.push_back(static_cast<char>(ch));
        }
        return out;
    }

    const std::vector<std::string>& comments() const { return comments_; }

private:
    std::istream& in_;
    std::vector<std::string> comments_;
};

template <typename T>
T parse_number(const std::string& text, const char* what) {
    if (text.empty()) fail(ErrorCode::MalformedHeader, std::string("missing ") + what);
    std::istringstream ss(text);
    T value{};
    ss >> value;
    if (!ss || !ss.eof()) fail(ErrorCode::MalformedHeader, std::string("bad ") + what + " '" + text + "'");
    return value;
}

std::size_t parse_extent(const std::string& text, const char* what) {
    const long long v = parse_number<long long>(text, what);
    if (v <= 0 || v > (1LL << 20)) fail(ErrorCode::MalformedHeader, std::string(what) + " out of range");
    return static_cast<std::size_t>(v);
}

void read_exact(std::istream& in, char* dst, std::size_t bytes) {
    in.read(dst, static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        fail(ErrorCode::TruncatedPayload, "expected " + std::to_string(bytes) + " payload bytes, got " +
                                              std::to_string(in.gcount()));
    }
}

} // namespace

LinearImage read_pfm(std::istream& in) {
    HeaderReader header(in);
    const std::string magic = header.token();
    std::size_t channels = 0;
    if (magic == "PF") {
        channels = 3;
    } else if (magic == "Pf") {
        channels = 1;
    } else {
        fail(ErrorCode::MalformedHeader, magic.empty() ? "empty PFM header" : "bad PFM magic '" + magic + "'");
    }
    const std::size_t width = parse_extent(header.token(), "width");
    const std::size_t height = parse_extent(header.token(), "height");
    const double scale = parse_number<double>(header.token(), "scale");
    if (!std::isfinite(scale) || scale == 0.0) fail(ErrorCode::MalformedHeader, "PFM scale must be nonzero");
    const bool little = scale < 0.0;

    const std::size_t count = width * height * channels;
    std::vector<std::uint32_t> raw(count);
    read_exact(in, reinterpret_cast<char*>(raw.data()), count * sizeof(std::uint32_t));
    const bool swap = little != (std::endian::native == std::endian::little);

    std::vector<double> values(count);
    const std::size_t row_len = width * channels;
    for (std::size_t file_row = 0; file_row < height; ++file_row) {
        const std::size_t y = height - 1 - file_row;
        for (std::size_t i = 0; i < row_len; ++i) {
            std::uint32_t bits = raw[file_row * row_len + i];
            if (swap) bits = __builtin_bswap32(bits);
            values[y * row_len + i] = std::bit_cast<float>(bits);
        }
    }
    return LinearImage(width, height, channels, std::move(values));
}

LinearImage read_pfm(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_pfm(in);
}

void write_pfm(std::ostream& out, const LinearImage& image) {
    out << (image.channels() == 3 ? "PF" : "Pf") << '\n'
        << image.width() << ' ' << image.height() << '\n'
        << (std::endian::native == std::endian::little ? "-1.0" : "1.0") << '\n';
    const std::size_t row_len = image.width() * image.channels();
    std::vector<float> row(row_len);
    auto data = image.data();
    for (std::size_t file_row = 0; file_row < image.height(); ++file_row) {
        const std::size_t y = image.height() - 1 - file_row;
        for (std::size_t i = 0; i < row_len; ++i) row[i] = static_cast<float>(data[y * row_len + i]);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_len * sizeof(float)));
    }
}

void write_pfm(const std::filesystem::path& path, const LinearImage& image) {
    auto out = open_output(path);
    write_pfm(out, image);
    finish_output(out, path);
}

std::vector<LinearImage> read_pfm_stack(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<LinearImage> images;
    while (in.peek() != std::char_traits<char>::eof()) images.push_back(read_pfm(in));
    if (images.empty()) fail(ErrorCode::MalformedHeader, "empty PFM stack " + path.string());
    return images;
}

void write_pfm_stack(const std::filesystem::path& path, const std::vector<LinearImage>& images) {
    auto out = open_output(path);
    for (const LinearImage& image : images) write_pfm(out, image);
    finish_output(out, path);
}

QuantizedReading read_pgm16(std::istream& in) {
    HeaderReader header(in);
    const std::string magic = header.token();
    std::size_t channels = 0;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        fail(ErrorCode::MalformedHeader, magic.empty() ? "empty PGM header" : "bad PGM magic '" + magic + "'");
    }
    const std::size_t width = parse_extent(header.token(), "width");
    const std::size_t height = parse_extent(header.token(), "height");
    const long long maxval = parse_number<long long>(header.token(), "maxval");
    if (maxval <= 0 || maxval > 65535) {
        fail(ErrorCode::UnsupportedMaxVal, "maxval " + std::to_string(maxval) + " outside [1, 65535]");
    }

    int bit_depth = 0;
    ExposureLayout layout{};
    for (const std::string& comment : header.comments()) {
        std::istringstream ss(comment);
        std::string key;
        ss >> key;
        if (key == "bitdepth") {
            ss >> bit_depth;
            if (!ss) fail(ErrorCode::MalformedHeader, "bad bitdepth comment");
        } else if (key == "layout") {
            std::string axis, parity;
            ss >> axis >> parity;
            if ((axis != "column" && axis != "row") || (parity != "even" && parity != "odd")) {
                fail(ErrorCode::MalformedHeader, "bad layout comment '" + comment + "'");
            }
            layout.axis = axis == "column" ? InterleaveAxis::Column : InterleaveAxis::Row;
            layout.low_on_even = parity == "even";
        }
    }
    if (bit_depth == 0) {
        for (int b = 8; b <= 16; ++b) {
            if (maxval == (1LL << b) - 1) bit_depth = b;
        }
    }
    if (bit_depth < 8 || bit_depth > 16 || maxval != (1LL << bit_depth) - 1) {
        fail(ErrorCode::UnsupportedMaxVal, "maxval " + std::to_string(maxval) + " is not 2^B - 1 for a bit depth in [8, 16]");
    }

    const std::size_t count = width * height * channels;
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes_per_sample);
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size());
    std::vector<std::uint16_t> samples(count);
    for (std::size_t i = 0; i < count; ++i) {
        samples[i] = bytes_per_sample == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
        if (samples[i] > maxval) {
            fail(ErrorCode::UnsupportedMaxVal, "sample " + std::to_string(samples[i]) + " exceeds maxval");
        }
    }
    return QuantizedReading(width, height, channels, bit_depth, layout, std::move(samples));
}

QuantizedReading read_pgm16(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_pgm16(in);
}

void write_pgm16(std::ostream& out, const QuantizedReading& reading) {
    const auto& layout = reading.layout();
    out << (reading.channels() == 3 ? "P6" : "P5") << '\n'
        << "# bitdepth " << reading.bit_depth() << '\n'
        << "# layout " << (layout.axis == InterleaveAxis::Column ? "column" : "row") << ' '
        << (layout.low_on_even ? "even" : "odd") << '\n'
        << reading.width() << ' ' << reading.height() << '\n'
        << reading.max_value() << '\n';
    const bool wide = reading.max_value() > 255;
    auto data = reading.data();
    std::vector<unsigned char> raw;
    raw.reserve(data.size() * (wide ? 2 : 1));
    for (std::uint16_t s : data) {
        if (wide) raw.push_back(static_cast<unsigned char>(s >> 8));
        raw.push_back(static_cast<unsigned char>(s & 0xFF));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm16(const std::filesystem::path& path, const QuantizedReading& reading) {
    auto out = open_output(path);
    write_pgm16(out, reading);
    finish_output(out, path);
}

LinearImage read_image(const std::filesystem::path& path) {
    auto in = open_input(path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.clear();
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == 'F' || magic[1] == 'f')) return read_pfm(in);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return dequantize(read_pgm16(in));
    fail(ErrorCode::MalformedHeader, "unrecognized image format: " + path.string());
}

} // namespace hdrdist
