#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdrdist/characterize.hpp"
#include "hdrdist/dataset.hpp"
#include "hdrdist/error.hpp"
#include "hdrdist/estimation.hpp"
#include "hdrdist/fusion.hpp"
#include "hdrdist/image_io.hpp"
#include "hdrdist/metrics.hpp"
#include "hdrdist/parallel.hpp"

namespace fs = std::filesystem;
using namespace hdrdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInsufficient = 3;
constexpr int kExitIo = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyModel:
    case ErrorCode::InsufficientBins:
    case ErrorCode::TooFewReadings:
        return kExitInsufficient;
    case ErrorCode::IoFailure:
        return kExitIo;
    default:
        return kExitUsage;
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* exposure_name(Exposure e) { return e == Exposure::Low ? "low" : "high"; }

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pfm" || ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create '" + path.string() + "'");
    return out;
}

void close_text(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
}

struct EstimateArgs {
    fs::path manifest;
    fs::path out;
    std::string axis = "row";
    fs::path hetgauss_out;
    bool keep_line_noise = false;
    std::size_t workers = 1;
};

int run_estimate(const EstimateArgs& args) {
    const DatasetManifest manifest = load_manifest(args.manifest);
    const std::vector<ReadingPair> pairs = load_capture_pairs(manifest);
    if (pairs.empty()) throw UsageError("manifest lists no capture pairs for estimation");
    const std::vector<QuantizedReading> calibration = load_calibration(manifest);

    EstimationOptions options;
    options.axis = args.axis == "column" ? LineAxis::Column : LineAxis::Row;
    options.separate_line_noise = !args.keep_line_noise;
    options.workers = args.workers;
    const EstimatedModels estimated = estimate_noise_models(pairs, calibration, options);
    write_noise_models(args.out, estimated.models);

    std::cout << "pairs " << pairs.size() << " calibration " << calibration.size() << '\n';
    const HistogramSet& h = estimated.pixel_histograms;
    for (std::size_t c = 0; c < h.channels(); ++c) {
        for (Exposure e : {Exposure::Low, Exposure::High}) {
            std::cout << "channel " << c << ' ' << exposure_name(e) << " observations " << h.at(c, e).total()
                      << " bins " << h.at(c, e).populated_rows() << '\n';
        }
    }
    if (!args.hetgauss_out.empty()) {
        auto out = open_text(args.hetgauss_out);
        write_hetgauss_table(out, fit_hetgauss(estimated.pixel_histograms));
        close_text(out, args.hetgauss_out);
    }
    return kExitOk;
}

struct SynthesizeArgs {
    fs::path manifest;
    fs::path model;
    fs::path out;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
};

int run_synthesize(const SynthesizeArgs& args) {
    const DatasetManifest manifest = load_manifest(args.manifest);
    if (!fs::exists(args.model)) throw UsageError("model '" + args.model.string() + "' does not exist");
    const NoiseModelFile models = read_noise_models(args.model);
    const std::uint64_t seed = args.seed.value_or(manifest.seed);

    std::vector<FrameStack> clips;
    for (const ClipEntry& clip : manifest.clips) clips.push_back(load_clip(clip, manifest.sensor.gamma));
    const auto jobs = plan_jobs(clips, manifest.sensor, manifest.window_step());
    const auto items = synthesize_dataset(clips, jobs, models, manifest.sensor, seed, args.workers);
    for (const SynthesisItem& item : items) {
        if (!item.ok()) {
            std::cerr << "item clip " << item.job.clip << " t " << item.job.start << " failed: " << item.error << '\n';
        }
    }
    const ExportSummary summary = export_dataset(args.out, items, manifest.sensor, manifest.patch, seed, args.workers);
    std::cout << "items " << summary.items << " failed " << summary.failed << " patches " << summary.patches
              << " seed " << seed << '\n';
    return kExitOk;
}

struct FuseArgs {
    fs::path in;
    fs::path out;
    double ratio = 4.0;
    std::string layout = "column";
    std::string low_parity = "even";
    double low_floor = 0.02;
    double high_ceiling = 0.98;
};

int run_fuse(const FuseArgs& args) {
    SensorConfig config;
    config.exposure_ratio = args.ratio;
    config.layout.axis = args.layout == "row" ? InterleaveAxis::Row : InterleaveAxis::Column;
    config.layout.low_on_even = args.low_parity == "even";
    config.validate();
    const FusionWeights weights{args.low_floor, args.high_ceiling};
    write_pfm(args.out, direct_fuse(read_image(args.in), config, weights));
    return kExitOk;
}

struct EvaluateArgs {
    fs::path pred;
    fs::path ref;
    double gamma = 2.2;
    int digits = 4;
    std::size_t workers = 1;
};

std::string format_value(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int run_evaluate(const EvaluateArgs& args) {
    auto score = [&](const fs::path& p, const fs::path& r) {
        return dssim(gamma_encode(read_image(p), args.gamma), gamma_encode(read_image(r), args.gamma));
    };
    const bool pred_dir = fs::is_directory(args.pred);
    if (pred_dir != fs::is_directory(args.ref)) throw UsageError("--pred and --ref must both be files or both directories");
    if (!pred_dir) {
        std::cout << format_value(score(args.pred, args.ref), args.digits) << '\n';
        return kExitOk;
    }
    const auto files = list_images(args.pred);
    if (files.empty()) throw UsageError("no images in '" + args.pred.string() + "'");
    for (const auto& f : files) {
        if (!fs::exists(args.ref / f.filename())) throw UsageError("no reference for '" + f.filename().string() + "'");
    }
    std::vector<double> values(files.size());
    parallel_for(files.size(), args.workers, [&](std::size_t i) { values[i] = score(files[i], args.ref / files[i].filename()); });
    double sum = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::cout << files[i].filename().string() << ' ' << format_value(values[i], args.digits) << '\n';
        sum += values[i];
    }
    std::cout << "mean " << format_value(sum / static_cast<double>(files.size()), args.digits) << '\n';
    return kExitOk;
}

struct CharacterizeArgs {
    fs::path readings;
    std::string mode = "low";
    fs::path out;
    fs::path reference;
    std::string center = "mean";
    double reference_scale = 1.0;
};

int run_characterize(const CharacterizeArgs& args) {
    if (!fs::is_directory(args.readings)) throw UsageError("'" + args.readings.string() + "' is not a directory");
    std::vector<QuantizedReading> readings;
    for (const auto& f : list_images(args.readings)) {
        if (f.extension() != ".pfm") readings.push_back(read_pgm16(f));
    }
    const QuantizedReading reference = args.reference.empty() ? mean_reading(readings) : read_pgm16(args.reference);
    VarianceOptions options;
    options.center = args.center == "reference" ? VarianceCenter::Reference : VarianceCenter::SampleMean;
    options.reference_scale = args.reference_scale;
    const Exposure mode = args.mode == "high" ? Exposure::High : Exposure::Low;
    const VarianceCurve curve = variance_by_radiance(std::span<const QuantizedReading>(readings), reference, mode, options);
    auto out = open_text(args.out);
    write_variance_table(out, curve);
    close_text(out, args.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-exposure HDR distortion modeling and dataset synthesis"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate pixel and row/column noise models from capture pairs");
    estimate->add_option("--manifest", est.manifest, "Dataset manifest")->required();
    estimate->add_option("--out", est.out, "Output model file")->required();
    estimate->add_option("--axis", est.axis, "Line noise axis")->check(CLI::IsMember({"row", "column"}));
    estimate->add_option("--hetgauss-out", est.hetgauss_out, "Also write a heteroscedastic Gaussian fit table");
    estimate->add_flag("--keep-line-noise", est.keep_line_noise, "Tally pixel histograms without removing line offsets");
    estimate->add_option("--workers", est.workers, "Worker threads")->check(CLI::PositiveNumber);

    SynthesizeArgs syn;
    auto* synthesize = app.add_subcommand("synthesize", "Generate clean/distorted pairs and patches from clips");
    synthesize->add_option("--manifest", syn.manifest, "Dataset manifest")->required();
    synthesize->add_option("--model", syn.model, "Noise model file")->required();
    synthesize->add_option("--out", syn.out, "Output directory")->required();
    synthesize->add_option("--seed", syn.seed, "Random seed (default: manifest seed)");
    synthesize->add_option("--workers", syn.workers, "Worker threads")->check(CLI::PositiveNumber);

    FuseArgs fu;
    auto* fuse = app.add_subcommand("fuse", "Fuse a dual-exposure mosaic into an HDR image");
    fuse->add_option("--in", fu.in, "Input mosaic (PFM or PGM)")->required();
    fuse->add_option("--out", fu.out, "Output PFM")->required();
    fuse->add_option("--ratio", fu.ratio, "Exposure ratio");
    fuse->add_option("--layout", fu.layout, "Interleave axis")->check(CLI::IsMember({"column", "row"}));
    fuse->add_option("--low-parity", fu.low_parity, "Lines carrying the low exposure")->check(CLI::IsMember({"even", "odd"}));
    fuse->add_option("--low-floor", fu.low_floor, "Hat weight floor");
    fuse->add_option("--high-ceiling", fu.high_ceiling, "Hat weight ceiling");
    std::size_t fuse_workers = 1;
    fuse->add_option("--workers", fuse_workers, "Accepted for uniformity; fusion is single-threaded")->check(CLI::PositiveNumber);

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "DSSIM between predictions and references");
    evaluate->add_option("--pred", ev.pred, "Prediction file or directory")->required();
    evaluate->add_option("--ref", ev.ref, "Reference file or directory")->required();
    evaluate->add_option("--gamma", ev.gamma, "Display gamma applied before comparison")->check(CLI::PositiveNumber);
    evaluate->add_option("--digits", ev.digits, "Decimal places")->check(CLI::Range(0, 17));
    evaluate->add_option("--workers", ev.workers, "Worker threads")->check(CLI::PositiveNumber);

    CharacterizeArgs ch;
    auto* characterize = app.add_subcommand("characterize", "Variance against radiance over repeated readings");
    characterize->add_option("--readings", ch.readings, "Directory of readings of one static scene")->required();
    characterize->add_option("--mode", ch.mode, "Exposure of the readings")->required()->check(CLI::IsMember({"low", "high"}));
    characterize->add_option("--out", ch.out, "Output table")->required();
    characterize->add_option("--reference", ch.reference, "Reference reading (default: mean of the readings)");
    characterize->add_option("--center", ch.center, "Deviation about the sample mean or the reference")
        ->check(CLI::IsMember({"mean", "reference"}));
    characterize->add_option("--reference-scale", ch.reference_scale, "Reading units per reference code");
    std::size_t characterize_workers = 1;
    characterize->add_option("--workers", characterize_workers, "Accepted for uniformity")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*estimate) return run_estimate(est);
        if (*synthesize) return run_synthesize(syn);
        if (*fuse) return run_fuse(fu);
        if (*evaluate) return run_evaluate(ev);
        if (*characterize) return run_characterize(ch);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
