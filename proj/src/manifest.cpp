#include "hdrdist/manifest.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "hdrdist/error.hpp"

namespace hdrdist {
namespace {

class LineParser {
public:
    LineParser(std::size_t line_no, const std::string& line) : line_no_(line_no), in_(line) {}

    std::string word(const char* what) {
        std::string w;
        if (!(in_ >> w)) error(std::string("missing ") + what);
        return w;
    }

    template <typename T>
    T number(const char* what) {
        const std::string text = word(what);
        std::istringstream ss(text);
        T value{};
        ss >> value;
        if (!ss || !ss.eof()) error(std::string("bad ") + what + " '" + text + "'");
        return value;
    }

    void finish() {
        std::string extra;
        if (in_ >> extra) error("unexpected trailing field '" + extra + "'");
    }

    [[noreturn]] void error(const std::string& message) const {
        fail(ErrorCode::ParseError, "manifest line " + std::to_string(line_no_) + ": " + message);
    }

private:
    std::size_t line_no_;
    std::istringstream in_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& text) {
    const std::filesystem::path p(text);
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

void apply_config(DatasetManifest& m, LineParser& p) {
    const std::string key = p.word("config key");
    auto positive = [&](const char* what) {
        const auto v = p.number<long long>(what);
        if (v <= 0) p.error(std::string(what) + " must be positive");
        return static_cast<std::size_t>(v);
    };
    if (key == "bit_depth") {
        m.sensor.bit_depth = p.number<int>("bit_depth");
    } else if (key == "exposure_ratio") {
        m.sensor.exposure_ratio = p.number<double>("exposure_ratio");
    } else if (key == "burst_length") {
        m.sensor.burst_length = p.number<int>("burst_length");
    } else if (key == "gamma") {
        m.sensor.gamma = p.number<double>("gamma");
    } else if (key == "layout") {
        const std::string v = p.word("layout");
        if (v != "column" && v != "row") p.error("layout must be column or row");
        m.sensor.layout.axis = v == "column" ? InterleaveAxis::Column : InterleaveAxis::Row;
    } else if (key == "low_parity") {
        const std::string v = p.word("low_parity");
        if (v != "even" && v != "odd") p.error("low_parity must be even or odd");
        m.sensor.layout.low_on_even = v == "even";
    } else if (key == "alignment") {
        const std::string v = p.word("alignment");
        if (v != "start" && v != "end") p.error("alignment must be start or end");
        m.sensor.alignment = v == "start" ? Alignment::Start : Alignment::End;
    } else if (key == "patch_width") {
        m.patch.width = positive("patch_width");
    } else if (key == "patch_height") {
        m.patch.height = positive("patch_height");
    } else if (key == "stride") {
        m.patch.stride = positive("stride");
    } else if (key == "frame_step") {
        m.frame_step = positive("frame_step");
    } else {
        p.error("unknown config key '" + key + "'");
    }
}

void require_exists(const std::filesystem::path& path, const std::string& entry) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) fail(ErrorCode::MissingPath, entry + " '" + path.string() + "' does not exist");
}

} // namespace

void PatchGeometry::validate() const {
    if (width == 0 || height == 0 || stride == 0) fail(ErrorCode::InvalidArgument, "patch extents and stride must be positive");
    if (width % 2 != 0 || height % 2 != 0 || stride % 2 != 0) {
        fail(ErrorCode::InvalidArgument, "patch extents and stride must be even");
    }
}

std::string DatasetManifest::split_of(const std::filesystem::path& path) const {
    const auto key = path.lexically_normal();
    for (const SplitEntry& s : splits) {
        if (s.path == key) return s.name;
    }
    return {};
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base) {
    DatasetManifest m;
    std::map<std::filesystem::path, std::string> split_owner;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        LineParser p(line_no, line);
        std::istringstream probe(line);
        std::string keyword;
        if (!(probe >> keyword)) continue;
        p.word("keyword");

        if (keyword == "clip") {
            ClipEntry clip;
            clip.directory = resolve(base, p.word("clip directory"));
            clip.pattern = p.word("frame pattern");
            clip.frame_rate = p.number<double>("frame rate");
            if (!(clip.frame_rate > 0.0)) p.error("frame rate must be positive");
            m.clips.push_back(std::move(clip));
        } else if (keyword == "pair") {
            CapturePair pair;
            pair.clean = resolve(base, p.word("clean path"));
            pair.distorted = resolve(base, p.word("distorted path"));
            m.pairs.push_back(std::move(pair));
        } else if (keyword == "calib") {
            m.calibration.push_back(resolve(base, p.word("calibration path")));
        } else if (keyword == "split") {
            SplitEntry split;
            split.name = p.word("split name");
            split.path = resolve(base, p.word("split path"));
            auto [it, inserted] = split_owner.emplace(split.path, split.name);
            if (!inserted && it->second != split.name) {
                fail(ErrorCode::DuplicateSplit, "manifest line " + std::to_string(line_no) + ": '" + split.path.string() +
                                                    "' is in both '" + it->second + "' and '" + split.name + "'");
            }
            if (inserted) m.splits.push_back(std::move(split));
        } else if (keyword == "seed") {
            m.seed = p.number<std::uint64_t>("seed");
        } else if (keyword == "config") {
            apply_config(m, p);
        } else {
            p.error("unknown keyword '" + keyword + "'");
        }
        p.finish();
    }
    try {
        m.sensor.validate();
        m.patch.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, std::string("manifest config: ") + e.what());
    }
    return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingPath, "manifest '" + path.string() + "' does not exist");
    DatasetManifest m = parse_manifest(in, path.parent_path());
    for (const ClipEntry& clip : m.clips) require_exists(clip.directory, "clip directory");
    for (const CapturePair& pair : m.pairs) {
        require_exists(pair.clean, "pair clean");
        require_exists(pair.distorted, "pair distorted");
    }
    for (const auto& calib : m.calibration) require_exists(calib, "calibration");
    for (const SplitEntry& split : m.splits) require_exists(split.path, "split " + split.name);
    return m;
}

} // namespace hdrdist
