#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "hdrdist/image.hpp"

namespace hdrdist::fixtures {

inline LinearImage random_image(std::size_t w, std::size_t h, std::size_t c, std::mt19937_64& rng, double lo = 0.0,
                                double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    LinearImage img(w, h, c);
    for (double& v : img.data()) v = static_cast<double>(static_cast<float>(dist(rng)));
    return img;
}

inline QuantizedReading random_reading(std::size_t w, std::size_t h, std::size_t c, int bits, std::mt19937_64& rng,
                                       ExposureLayout layout = {}) {
    std::uniform_int_distribution<std::uint32_t> dist(0, max_value_for(bits));
    QuantizedReading r(w, h, c, bits, layout);
    for (auto& v : r.data()) v = static_cast<std::uint16_t>(dist(rng));
    return r;
}

// Fresh empty directory under the build tree, removed at destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("hdrdist_test_" + name + "_" + std::to_string(::getpid()))) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace hdrdist::fixtures
