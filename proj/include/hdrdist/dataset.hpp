#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hdrdist/blur.hpp"
#include "hdrdist/manifest.hpp"
#include "hdrdist/model_io.hpp"
#include "hdrdist/noise_model.hpp"

namespace hdrdist {

// Frames of a clip: matching files in name order, read and linearized.
FrameStack load_clip(const ClipEntry& clip, double gamma);

// Capture pairs from the manifest, excluding those assigned to the "test" split.
std::vector<ReadingPair> load_capture_pairs(const DatasetManifest& manifest);
std::vector<QuantizedReading> load_calibration(const DatasetManifest& manifest);

struct SynthesisJob {
    std::size_t clip = 0;
    std::size_t start = 0;
    std::uint32_t id = 0; // global job index, keys the random streams
};

// One job per full burst window, windows starting every `step` frames.
std::vector<SynthesisJob> plan_jobs(const std::vector<FrameStack>& clips, const SensorConfig& config, std::size_t step);

struct SynthesisItem {
    SynthesisJob job;
    LinearImage reference;    // aligned sharp frame, linear
    LinearImage clean_mosaic; // reference against its exposure-scaled self
    LinearImage distorted;    // blur, pixel noise, row/column noise
    std::string error;        // non-empty when the item failed

    bool ok() const noexcept { return error.empty(); }
};

SynthesisItem synthesize_item(const FrameStack& stack, const SynthesisJob& job, const NoiseModelFile& models,
                              const SensorConfig& config, std::uint64_t seed);

// Runs every job; a failing job is reported in its item and the rest continue.
std::vector<SynthesisItem> synthesize_dataset(const std::vector<FrameStack>& clips,
                                              const std::vector<SynthesisJob>& jobs, const NoiseModelFile& models,
                                              const SensorConfig& config, std::uint64_t seed, std::size_t workers = 1);

// Distorted patch as half-resolution planes: low and high exposure (C
// channels each), a clamp mask and a constant 1/r plane. Packed, this is a
// 2C + 2 channel tensor (8 for RGB).
struct PatchPair {
    std::size_t x = 0;
    std::size_t y = 0;
    LinearImage low;
    LinearImage high;
    LinearImage clamp_mask;
    LinearImage ratio_plane;
    LinearImage clean;

    std::size_t packed_channels() const noexcept { return 2 * low.channels() + 2; }
};

inline constexpr double kClampEpsilon = 1e-6;

// Mask is 1 where the largest channel of the high plane is >= 1 - epsilon.
LinearImage clamp_mask(const LinearImage& high, double epsilon = kClampEpsilon);

// Channel-interleaved tensor of a patch's distorted planes, and back.
std::vector<double> pack_distorted(const PatchPair& patch);
void unpack_distorted(std::span<const double> packed, std::size_t width, std::size_t height, std::size_t channels,
                      LinearImage& low, LinearImage& high);

// Patch origins along one axis: a seed-jittered grid of the given stride,
// with 0 and extent - patch always included so every pixel is covered when
// stride <= patch. Grid origins are even; the last origin is extent - patch.
std::vector<std::size_t> patch_origins(std::size_t extent, std::size_t patch, std::size_t stride, std::uint64_t seed,
                                       std::uint32_t item, std::uint32_t axis);

// Throws PatchTooLarge when the geometry exceeds the image.
std::vector<PatchPair> extract_patches(const LinearImage& clean, const LinearImage& distorted,
                                       const SensorConfig& config, const PatchGeometry& geometry, std::uint64_t seed,
                                       std::uint32_t item = 0);

struct ExportSummary {
    std::size_t items = 0;
    std::size_t failed = 0;
    std::size_t patches = 0;
};

// Writes pairs/<name>_{reference,clean,distorted}.pfm, patches/<name>_x<x>_y<y>_{distorted,clean}.pfm
// and index.txt (`<distorted.pfm> <clean.pfm> <x> <y> <clip> <t>` per patch).
// Names are derived from (clip, t, x, y) only.
ExportSummary export_dataset(const std::filesystem::path& out_dir, const std::vector<SynthesisItem>& items,
                             const SensorConfig& config, const PatchGeometry& geometry, std::uint64_t seed,
                             std::size_t workers = 1);

} // namespace hdrdist
