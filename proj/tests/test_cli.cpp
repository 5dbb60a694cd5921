#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "hdrdist/image_io.hpp"
#include "hdrdist/metrics.hpp"
#include "hdrdist/model_io.hpp"
#include "hdrdist/virtual_sensor.hpp"
#include "support.hpp"

using namespace hdrdist;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const fixtures::TempDir& dir) {
    const fs::path log = dir / "stdout.txt";
    const std::string command = std::string("\"") + HDRDIST_CLI + "\" " + args + " > \"" + log.string() + "\" 2>/dev/null";
    const int raw = std::system(command.c_str());
    RunResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

// Capture pairs from a virtual sensor written as PGM files plus a manifest.
void write_capture_set(const fixtures::TempDir& dir, std::size_t count) {
    std::mt19937_64 rng(11);
    VirtualSensorParams p{0.5, 10.0, 1.0, 4.0, 12, std::nullopt};
    std::ofstream manifest(dir / "capture.txt");
    fs::create_directories(dir / "cap");
    for (std::size_t i = 0; i < count; ++i) {
        const LinearImage scene = fixtures::random_image(32, 16, 3, rng, 0.0, 0.25);
        const std::string n = std::to_string(i);
        write_pgm16(dir / ("cap/clean" + n + ".ppm"), virtual_clean_reading(scene, p));
        write_pgm16(dir / ("cap/dist" + n + ".ppm"), virtual_sensor(scene, p, {}, 5, static_cast<std::uint32_t>(i)));
        manifest << "pair cap/clean" << n << ".ppm cap/dist" << n << ".ppm\n";
    }
}

void write_clip_set(const fixtures::TempDir& dir) {
    std::mt19937_64 rng(12);
    fs::create_directories(dir / "clip");
    for (int i = 0; i < 8; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "clip/f%03d.pfm", i);
        write_pfm(dir / name, fixtures::random_image(32, 32, 3, rng, 0.0, 0.6));
    }
    std::ofstream(dir / "clips.txt") << "clip clip f*.pfm 240\nconfig patch_width 16\nconfig patch_height 16\n"
                                        "config stride 16\n";
}

} // namespace

TEST(Cli, UsageErrors) {
    fixtures::TempDir dir("cli_usage");
    EXPECT_EQ(run_cli("", dir).status, 2);
    EXPECT_EQ(run_cli("bogus", dir).status, 2);
    EXPECT_EQ(run_cli("evaluate --pred x.pfm", dir).status, 2);
    EXPECT_EQ(run_cli("--help", dir).status, 0);
    EXPECT_EQ(run_cli("evaluate --pred " + quoted(dir / "none.pfm") + " --ref " + quoted(dir / "none.pfm"), dir).status,
              4);
}

TEST(Cli, EvaluateIdenticalAndMatchesLibrary) {
    fixtures::TempDir dir("cli_eval");
    std::mt19937_64 rng(13);
    const LinearImage a = fixtures::random_image(40, 30, 3, rng);
    const LinearImage b = fixtures::random_image(40, 30, 3, rng);
    write_pfm(dir / "a.pfm", a);
    write_pfm(dir / "b.pfm", b);
    RunResult same = run_cli("evaluate --pred " + quoted(dir / "a.pfm") + " --ref " + quoted(dir / "a.pfm"), dir);
    EXPECT_EQ(same.status, 0);
    EXPECT_EQ(same.out, "0.0000\n");

    RunResult diff =
        run_cli("evaluate --digits 12 --pred " + quoted(dir / "a.pfm") + " --ref " + quoted(dir / "b.pfm"), dir);
    ASSERT_EQ(diff.status, 0);
    const double expected = dssim(gamma_encode(a, 2.2), gamma_encode(b, 2.2));
    EXPECT_NEAR(std::stod(diff.out), expected, 1e-9);
}

TEST(Cli, EvaluateDirectories) {
    fixtures::TempDir dir("cli_evaldir");
    fs::create_directories(dir / "p");
    fs::create_directories(dir / "r");
    std::mt19937_64 rng(14);
    for (const char* n : {"x.pfm", "y.pfm"}) {
        const LinearImage img = fixtures::random_image(16, 16, 1, rng);
        write_pfm(dir / (std::string("p/") + n), img);
        write_pfm(dir / (std::string("r/") + n), img);
    }
    RunResult r = run_cli("evaluate --pred " + quoted(dir / "p") + " --ref " + quoted(dir / "r"), dir);
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "x.pfm 0.0000\ny.pfm 0.0000\nmean 0.0000\n");
}

TEST(Cli, EstimateWritesSixTablesPerModel) {
    fixtures::TempDir dir("cli_estimate");
    write_capture_set(dir, 30);
    RunResult r = run_cli("estimate --workers 4 --manifest " + quoted(dir / "capture.txt") + " --out " +
                              quoted(dir / "model.dxnm") + " --hetgauss-out " + quoted(dir / "fit.txt"),
                          dir);
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(r.out.rfind("pairs 30 calibration 0\n", 0), 0u);
    const NoiseModelFile m = read_noise_models(dir / "model.dxnm");
    EXPECT_EQ(m.pixel.tables.size(), 6u);
    EXPECT_EQ(m.pixel.pair_count, 30u);
    ASSERT_EQ(m.rowcol.size(), 1u);
    EXPECT_EQ(m.rowcol[0].tables.size(), 6u);
    EXPECT_FALSE(slurp(dir / "fit.txt").empty());

    // Same inputs, different worker count: byte-identical model.
    ASSERT_EQ(run_cli("estimate --manifest " + quoted(dir / "capture.txt") + " --out " + quoted(dir / "again.dxnm"), dir)
                  .status,
              0);
    EXPECT_EQ(slurp(dir / "model.dxnm"), slurp(dir / "again.dxnm"));
}

TEST(Cli, EstimateWithoutPairsIsUsageError) {
    fixtures::TempDir dir("cli_nopairs");
    std::ofstream(dir / "m.txt") << "seed 3\n";
    EXPECT_EQ(run_cli("estimate --manifest " + quoted(dir / "m.txt") + " --out " + quoted(dir / "o.dxnm"), dir).status,
              2);
    std::ofstream(dir / "bad.txt") << "pair missing.pgm other.pgm\n";
    EXPECT_EQ(run_cli("estimate --manifest " + quoted(dir / "bad.txt") + " --out " + quoted(dir / "o.dxnm"), dir).status,
              2);
}

TEST(Cli, SynthesizeIsDeterministicAndSeeded) {
    fixtures::TempDir dir("cli_synth");
    write_capture_set(dir, 4);
    write_clip_set(dir);
    ASSERT_EQ(run_cli("estimate --manifest " + quoted(dir / "capture.txt") + " --out " + quoted(dir / "m.dxnm"), dir)
                  .status,
              0);
    const std::string base = "synthesize --manifest " + quoted(dir / "clips.txt") + " --model " + quoted(dir / "m.dxnm");
    RunResult a = run_cli(base + " --seed 1 --out " + quoted(dir / "a"), dir);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out.rfind("items 2 failed 0 patches ", 0), 0u);
    EXPECT_NE(a.out.find(" seed 1\n"), std::string::npos);
    ASSERT_EQ(run_cli(base + " --seed 1 --workers 4 --out " + quoted(dir / "b"), dir).status, 0);
    ASSERT_EQ(run_cli(base + " --seed 2 --out " + quoted(dir / "c"), dir).status, 0);

    const std::string stem = "pairs/c000_t00000_";
    EXPECT_EQ(slurp(dir / "a" / "index.txt"), slurp(dir / "b" / "index.txt"));
    EXPECT_EQ(slurp(dir / "a" / (stem + "distorted.pfm")), slurp(dir / "b" / (stem + "distorted.pfm")));
    EXPECT_NE(slurp(dir / "a" / (stem + "distorted.pfm")), slurp(dir / "c" / (stem + "distorted.pfm")));
    EXPECT_EQ(slurp(dir / "a" / (stem + "clean.pfm")), slurp(dir / "c" / (stem + "clean.pfm")));
    EXPECT_EQ(slurp(dir / "a" / (stem + "reference.pfm")), slurp(dir / "c" / (stem + "reference.pfm")));

    EXPECT_EQ(run_cli("synthesize --manifest " + quoted(dir / "clips.txt") + " --model " + quoted(dir / "none.dxnm") +
                          " --out " + quoted(dir / "d"),
                      dir)
                  .status,
              2);
}

TEST(Cli, FuseAndCharacterize) {
    fixtures::TempDir dir("cli_fuse");
    write_pfm(dir / "mosaic.pfm", LinearImage(16, 8, 3, 0.1));
    ASSERT_EQ(run_cli("fuse --in " + quoted(dir / "mosaic.pfm") + " --out " + quoted(dir / "hdr.pfm"), dir).status, 0);
    const LinearImage hdr = read_pfm(dir / "hdr.pfm");
    EXPECT_EQ(hdr.width(), 16u);
    // Equal hat weights: the mean of 0.1 and 0.1 / 4.
    EXPECT_NEAR(hdr.at(3, 3, 0), 0.0625, 1e-6);

    fs::create_directories(dir / "reads");
    write_pgm16(dir / "reads" / "only.pgm", QuantizedReading(4, 4, 1, 12));
    EXPECT_EQ(run_cli("characterize --mode high --readings " + quoted(dir / "reads") + " --out " +
                          quoted(dir / "var.txt"),
                      dir)
                  .status,
              3);
    write_pgm16(dir / "reads" / "two.pgm", QuantizedReading(4, 4, 1, 12, {}, 2));
    ASSERT_EQ(run_cli("characterize --mode high --readings " + quoted(dir / "reads") + " --out " +
                          quoted(dir / "var.txt"),
                      dir)
                  .status,
              0);
    EXPECT_EQ(slurp(dir / "var.txt"), "1 1 2\n");
}
