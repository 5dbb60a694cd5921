#include "hdrdist/dataset.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "hdrdist/error.hpp"
#include "hdrdist/image_io.hpp"
#include "hdrdist/parallel.hpp"
#include "hdrdist/random.hpp"
#include "hdrdist/rowcol_noise.hpp"

namespace hdrdist {
namespace {

LinearImage crop(const LinearImage& image, std::size_t x0, std::size_t y0, std::size_t width, std::size_t height) {
    LinearImage out(width, height, image.channels());
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.at(x0 + x, y0 + y, c);
        }
    }
    return out;
}

std::string item_name(const SynthesisJob& job) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "c%03zu_t%05zu", job.clip, job.start);
    return buf;
}

} // namespace

FrameStack load_clip(const ClipEntry& clip, double gamma) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(clip.directory, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (fnmatch(clip.pattern.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
    }
    if (ec) fail(ErrorCode::IoFailure, "cannot list clip directory '" + clip.directory.string() + "'");
    if (files.empty()) {
        fail(ErrorCode::MissingPath, "clip '" + clip.directory.string() + "' has no frames matching '" + clip.pattern + "'");
    }
    std::sort(files.begin(), files.end());
    FrameStack stack;
    stack.nominal_rate = clip.frame_rate;
    stack.frames.reserve(files.size());
    for (const auto& file : files) stack.frames.push_back(linearize(read_image(file), gamma));
    return stack;
}

std::vector<ReadingPair> load_capture_pairs(const DatasetManifest& manifest) {
    std::vector<ReadingPair> pairs;
    for (const CapturePair& entry : manifest.pairs) {
        if (manifest.split_of(entry.clean) == "test" || manifest.split_of(entry.distorted) == "test") continue;
        pairs.push_back({read_pgm16(entry.clean), read_pgm16(entry.distorted)});
    }
    return pairs;
}

std::vector<QuantizedReading> load_calibration(const DatasetManifest& manifest) {
    std::vector<QuantizedReading> readings;
    for (const auto& path : manifest.calibration) readings.push_back(read_pgm16(path));
    return readings;
}

std::vector<SynthesisJob> plan_jobs(const std::vector<FrameStack>& clips, const SensorConfig& config, std::size_t step) {
    if (step == 0) fail(ErrorCode::InvalidArgument, "frame step must be positive");
    const auto n = static_cast<std::size_t>(config.burst_length);
    std::vector<SynthesisJob> jobs;
    for (std::size_t c = 0; c < clips.size(); ++c) {
        for (std::size_t start = 0; start + n <= clips[c].frames.size(); start += step) {
            jobs.push_back({c, start, static_cast<std::uint32_t>(jobs.size())});
        }
    }
    return jobs;
}

SynthesisItem synthesize_item(const FrameStack& stack, const SynthesisJob& job, const NoiseModelFile& models,
                              const SensorConfig& config, std::uint64_t seed) {
    SynthesisItem item;
    item.job = job;
    item.reference = simulate_low_frame(stack, low_frame_index(job.start, config));
    item.clean_mosaic = synthesize_static_mosaic(item.reference, config);
    LinearImage image = synthesize_mb_mosaic(stack, job.start, config);
    image = apply_pixel_noise(image, models.pixel, config, seed, job.id);
    for (const RowColNoiseModel& rowcol : models.rowcol) image = apply_rowcol_noise(image, rowcol, config, seed, job.id);
    item.distorted = std::move(image);
    return item;
}

std::vector<SynthesisItem> synthesize_dataset(const std::vector<FrameStack>& clips,
                                              const std::vector<SynthesisJob>& jobs, const NoiseModelFile& models,
                                              const SensorConfig& config, std::uint64_t seed, std::size_t workers) {
    config.validate();
    std::vector<SynthesisItem> items(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        try {
            if (jobs[i].clip >= clips.size()) fail(ErrorCode::IndexOutOfBounds, "job refers to a missing clip");
            items[i] = synthesize_item(clips[jobs[i].clip], jobs[i], models, config, seed);
        } catch (const std::exception& e) {
            items[i] = SynthesisItem{};
            items[i].job = jobs[i];
            items[i].error = e.what();
        }
    });
    return items;
}

LinearImage clamp_mask(const LinearImage& high, double epsilon) {
    LinearImage mask(high.width(), high.height(), 1);
    for (std::size_t y = 0; y < high.height(); ++y) {
        for (std::size_t x = 0; x < high.width(); ++x) {
            double peak = high.at(x, y, 0);
            for (std::size_t c = 1; c < high.channels(); ++c) peak = std::max(peak, high.at(x, y, c));
            mask.at(x, y, 0) = peak >= 1.0 - epsilon ? 1.0 : 0.0;
        }
    }
    return mask;
}

std::vector<double> pack_distorted(const PatchPair& patch) {
    const std::size_t channels = patch.low.channels();
    const std::size_t packed = patch.packed_channels();
    const std::size_t pixels = patch.low.width() * patch.low.height();
    std::vector<double> out(pixels * packed);
    for (std::size_t i = 0; i < pixels; ++i) {
        double* dst = &out[i * packed];
        for (std::size_t c = 0; c < channels; ++c) {
            dst[c] = patch.low.data()[i * channels + c];
            dst[channels + c] = patch.high.data()[i * channels + c];
        }
        dst[2 * channels] = patch.clamp_mask.data()[i];
        dst[2 * channels + 1] = patch.ratio_plane.data()[i];
    }
    return out;
}

void unpack_distorted(std::span<const double> packed, std::size_t width, std::size_t height, std::size_t channels,
                      LinearImage& low, LinearImage& high) {
    const std::size_t stride = 2 * channels + 2;
    if (packed.size() != width * height * stride) fail(ErrorCode::SizeMismatch, "packed tensor size mismatch");
    low = LinearImage(width, height, channels);
    high = LinearImage(width, height, channels);
    for (std::size_t i = 0; i < width * height; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
            low.data()[i * channels + c] = packed[i * stride + c];
            high.data()[i * channels + c] = packed[i * stride + channels + c];
        }
    }
}

std::vector<std::size_t> patch_origins(std::size_t extent, std::size_t patch, std::size_t stride, std::uint64_t seed,
                                       std::uint32_t item, std::uint32_t axis) {
    if (patch > extent) fail(ErrorCode::PatchTooLarge, "patch of " + std::to_string(patch) + " exceeds extent " +
                                                           std::to_string(extent));
    const std::size_t last = extent - patch;
    const std::size_t max_jitter = std::min(stride, last) / 2;
    const SiteRandom draw(seed, Stream::PatchOrigin, item, axis);
    const std::size_t jitter = 2 * std::min(max_jitter, static_cast<std::size_t>(draw.uniform() * (max_jitter + 1)));

    std::vector<std::size_t> origins{0};
    for (std::size_t p = jitter; p <= last; p += stride) origins.push_back(p);
    origins.push_back(last);
    std::sort(origins.begin(), origins.end());
    origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
    return origins;
}

std::vector<PatchPair> extract_patches(const LinearImage& clean, const LinearImage& distorted,
                                       const SensorConfig& config, const PatchGeometry& geometry, std::uint64_t seed,
                                       std::uint32_t item) {
    geometry.validate();
    if (!clean.same_shape(distorted)) fail(ErrorCode::SizeMismatch, "clean and distorted images differ in shape");
    if (geometry.width > clean.width() || geometry.height > clean.height()) {
        fail(ErrorCode::PatchTooLarge, "patch " + std::to_string(geometry.width) + "x" + std::to_string(geometry.height) +
                                           " exceeds image " + std::to_string(clean.width()) + "x" +
                                           std::to_string(clean.height()));
    }
    const auto xs = patch_origins(clean.width(), geometry.width, geometry.stride, seed, item, 0);
    const auto ys = patch_origins(clean.height(), geometry.height, geometry.stride, seed, item, 1);
    std::vector<PatchPair> patches;
    patches.reserve(xs.size() * ys.size());
    for (std::size_t y : ys) {
        for (std::size_t x : xs) {
            PatchPair p;
            p.x = x;
            p.y = y;
            ExposurePair planes = deinterleave(crop(distorted, x, y, geometry.width, geometry.height), config.layout);
            p.low = std::move(planes.low);
            p.high = std::move(planes.high);
            p.clamp_mask = clamp_mask(p.high);
            p.ratio_plane = LinearImage(p.low.width(), p.low.height(), 1, 1.0 / config.exposure_ratio);
            p.clean = crop(clean, x, y, geometry.width, geometry.height);
            patches.push_back(std::move(p));
        }
    }
    return patches;
}

ExportSummary export_dataset(const std::filesystem::path& out_dir, const std::vector<SynthesisItem>& items,
                             const SensorConfig& config, const PatchGeometry& geometry, std::uint64_t seed,
                             std::size_t workers) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "pairs", ec);
    std::filesystem::create_directories(out_dir / "patches", ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create output directories under '" + out_dir.string() + "'");

    std::vector<std::string> index(items.size());
    std::vector<std::size_t> patch_counts(items.size(), 0);
    parallel_for(items.size(), workers, [&](std::size_t i) {
        const SynthesisItem& item = items[i];
        if (!item.ok()) return;
        const std::string name = item_name(item.job);
        write_pfm(out_dir / "pairs" / (name + "_reference.pfm"), item.reference);
        write_pfm(out_dir / "pairs" / (name + "_clean.pfm"), item.clean_mosaic);
        write_pfm(out_dir / "pairs" / (name + "_distorted.pfm"), item.distorted);
        const auto patches = extract_patches(item.reference, item.distorted, config, geometry, seed, item.job.id);
        for (const PatchPair& p : patches) {
            const std::string stem = name + "_x" + std::to_string(p.x) + "_y" + std::to_string(p.y);
            const std::string distorted_rel = "patches/" + stem + "_distorted.pfm";
            const std::string clean_rel = "patches/" + stem + "_clean.pfm";
            write_pfm_stack(out_dir / distorted_rel, {p.low, p.high, p.clamp_mask, p.ratio_plane});
            write_pfm(out_dir / clean_rel, p.clean);
            index[i] += distorted_rel + ' ' + clean_rel + ' ' + std::to_string(p.x) + ' ' + std::to_string(p.y) + ' ' +
                        std::to_string(item.job.clip) + ' ' + std::to_string(item.job.start) + '\n';
        }
        patch_counts[i] = patches.size();
    });

    ExportSummary summary;
    std::ofstream out(out_dir / "index.txt", std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create '" + (out_dir / "index.txt").string() + "'");
    for (std::size_t i = 0; i < items.size(); ++i) {
        out << index[i];
        ++summary.items;
        if (!items[i].ok()) ++summary.failed;
        summary.patches += patch_counts[i];
    }
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for index.txt");
    return summary;
}

} // namespace hdrdist
