#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Seed used when neither the manifest nor the command line names one.
inline constexpr std::uint64_t kDefaultSeed = 20240229;

struct ClipEntry {
    std::filesystem::path directory;
    std::string pattern; // glob with * and ?, matched against file names
    double frame_rate = 240.0;
};

struct CapturePair {
    std::filesystem::path clean;
    std::filesystem::path distorted;
};

struct SplitEntry {
    std::string name;
    std::filesystem::path path;
};

// Clean patch size at full resolution; the distorted patch is half as wide
// (or half as tall for row interleaving). Extents and stride must be even.
struct PatchGeometry {
    std::size_t width = 128;
    std::size_t height = 128;
    std::size_t stride = 128;

    void validate() const;
};

struct DatasetManifest {
    std::vector<ClipEntry> clips;
    std::vector<CapturePair> pairs;
    std::vector<std::filesystem::path> calibration;
    std::vector<SplitEntry> splits;
    std::uint64_t seed = kDefaultSeed;
    SensorConfig sensor;
    PatchGeometry patch;
    std::size_t frame_step = 0; // 0: one window per burst length

    std::size_t window_step() const noexcept {
        return frame_step == 0 ? static_cast<std::size_t>(sensor.burst_length) : frame_step;
    }
    // Name of the split holding `path`, empty when unassigned.
    std::string split_of(const std::filesystem::path& path) const;
};

// Line format, '#' comments and blank lines ignored:
//   clip <dir> <pattern> <fps>
//   pair <clean> <distorted>
//   calib <path>
//   split <name> <path>
//   seed <u64>
//   config <key> <value>
// Relative paths resolve against `base`. Entries keep file order. Throws
// ParseError with the line number, or DuplicateSplit.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base);

// parse_manifest plus a check that every referenced path exists (MissingPath).
DatasetManifest load_manifest(const std::filesystem::path& path);

} // namespace hdrdist
