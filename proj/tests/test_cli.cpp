// Integration tests driving the installed command-line binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "derain/metrics.hpp"
#include "derain/synth.hpp"
#include "derain/tensor.hpp"
#include "derain/videoio.hpp"
#include "support/scenes.hpp"

using namespace derain;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("derain_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(DERAIN_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

double parse_kv(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + "=");
    if (pos == std::string::npos) throw std::runtime_error("missing key " + key);
    return std::stod(text.substr(pos + key.size() + 1));
}

} // namespace

TEST(Cli, SimulateIsDeterministicAcrossRuns) {
    TempDir dir;
    const std::string args = "simulate --dims 24x24x4 --density 0.01 --length 8 "
                             "--angle-mode fixed:20 --intensity 0.6 --seed 5 --out-rain ";
    RunResult a = run_cli(args + (dir.path / "a.fdr").string(), dir.path);
    RunResult b = run_cli(args + (dir.path / "b.fdr").string(), dir.path);
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(dir.path / "a.fdr"), slurp(dir.path / "b.fdr"));
}

TEST(Cli, DerainIsDeterministicAcrossRuns) {
    TempDir dir;
    scenes::RainyScene scene = scenes::make_scene(16, 16, 6, 0.0);
    write_raw(dir.path / "o.fdr", scene.observed);
    const std::string base = "derain --input " + (dir.path / "o.fdr").string() +
                             " --max-iter 30 --out-bg ";
    RunResult a = run_cli(base + (dir.path / "a.fdr").string(), dir.path);
    RunResult b = run_cli(base + (dir.path / "b.fdr").string(), dir.path);
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(dir.path / "a.fdr"), slurp(dir.path / "b.fdr"));
}

TEST(Cli, RainFreeConstantInputYieldsNearZeroRain) {
    TempDir dir;
    write_raw(dir.path / "o.fdr", Tensor3::constant(16, 16, 4, 0.5));
    RunResult r = run_cli("derain --input " + (dir.path / "o.fdr").string() + " --angle 0" +
                              " --out-bg " + (dir.path / "b.fdr").string() + " --out-rain " +
                              (dir.path / "r.fdr").string(),
                          dir.path);
    ASSERT_EQ(r.code, 0) << r.err;
    Tensor3 rain = read_raw(dir.path / "r.fdr");
    EXPECT_LE(frobenius_norm(rain), 1e-3);
    EXPECT_NE(r.out.find("iterations="), std::string::npos);
    EXPECT_NE(r.out.find("residual_4="), std::string::npos);
}

TEST(Cli, DerainRecoversPsnrOnSimulatedRain) {
    TempDir dir;
    scenes::RainyScene scene = scenes::make_scene(32, 32, 8, 0.0);
    write_raw(dir.path / "truth.fdr", scene.truth);
    write_raw(dir.path / "rainy.fdr", scene.observed);
    RunResult r = run_cli("derain --input " + (dir.path / "rainy.fdr").string() +
                              " --max-iter 400 --out-bg " + (dir.path / "bg.fdr").string(),
                          dir.path);
    ASSERT_EQ(r.code, 0) << r.err;

    RunResult rainy = run_cli("metrics --ref " + (dir.path / "truth.fdr").string() + " --test " +
                                  (dir.path / "rainy.fdr").string(),
                              dir.path);
    RunResult restored = run_cli("metrics --ref " + (dir.path / "truth.fdr").string() +
                                     " --test " + (dir.path / "bg.fdr").string(),
                                 dir.path);
    ASSERT_EQ(rainy.code, 0);
    ASSERT_EQ(restored.code, 0);
    EXPECT_GE(parse_kv(restored.out, "psnr"), parse_kv(rainy.out, "psnr") + 3.0);
}

TEST(Cli, MissingInputNamesThePath) {
    TempDir dir;
    RunResult r = run_cli("derain --input /no/such/video.fdr", dir.path);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/such/video.fdr"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
    TempDir dir;
    RunResult r = run_cli("derain --frobnicate", dir.path);
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, NumericDomainFailuresExitThree) {
    TempDir dir;
    RunResult bad_density = run_cli("simulate --dims 8x8x3 --density 2.0 --out-rain " +
                                        (dir.path / "r.fdr").string(),
                                    dir.path);
    EXPECT_EQ(bad_density.code, 3);

    write_raw(dir.path / "a.fdr", Tensor3::constant(8, 8, 2, 0.5));
    write_raw(dir.path / "b.fdr", Tensor3::constant(8, 8, 3, 0.5));
    RunResult mismatch = run_cli("metrics --ref " + (dir.path / "a.fdr").string() + " --test " +
                                     (dir.path / "b.fdr").string(),
                                 dir.path);
    EXPECT_EQ(mismatch.code, 3);
}

TEST(Cli, AngleAndAutoAngleAreMutuallyExclusive) {
    TempDir dir;
    write_raw(dir.path / "o.fdr", Tensor3::constant(8, 8, 4, 0.5));
    RunResult r = run_cli("derain --input " + (dir.path / "o.fdr").string() +
                              " --angle 10 --auto-angle",
                          dir.path);
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, DetectAnglePrintsFortyFive) {
    TempDir dir;
    write_raw(dir.path / "v.fdr", scenes::flat_with_streaks(64, 64, 6, 45.0));
    RunResult r = run_cli("detect-angle --input " + (dir.path / "v.fdr").string() +
                              " --curve-csv " + (dir.path / "curve.csv").string(),
                          dir.path);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_kv(r.out, "theta_hat"), 45.0);
    // header plus one row per swept degree
    std::ifstream csv(dir.path / "curve.csv");
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    EXPECT_EQ(line, "theta_deg,y");
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 179);
}

TEST(Cli, DetectAngleVerticalPrintsZero) {
    TempDir dir;
    write_raw(dir.path / "v.fdr", scenes::flat_with_streaks(48, 48, 6, 0.0));
    RunResult r = run_cli("detect-angle --input " + (dir.path / "v.fdr").string(), dir.path);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_kv(r.out, "theta_hat"), 0.0);
}

TEST(Cli, MetricsOfIdenticalInputs) {
    TempDir dir;
    write_raw(dir.path / "v.fdr", scenes::flat_with_streaks(32, 32, 4, 0.0));
    RunResult r = run_cli("metrics --ref " + (dir.path / "v.fdr").string() + " --test " +
                              (dir.path / "v.fdr").string() + " --csv " +
                              (dir.path / "q.csv").string(),
                          dir.path);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("psnr=inf"), std::string::npos);
    EXPECT_EQ(parse_kv(r.out, "ssim_mean"), 1.0);
    const std::string csv = slurp(dir.path / "q.csv");
    EXPECT_NE(csv.find("psnr,ssim_mean"), std::string::npos);
    EXPECT_NE(csv.find("inf,1"), std::string::npos);
}

TEST(Cli, MetricsNoiseOrderingMatchesSigma) {
    TempDir dir;
    Tensor3 clean = scenes::moving_gradient_background(24, 24, 6);
    write_raw(dir.path / "clean.fdr", clean);
    write_raw(dir.path / "s1.fdr", composite(clean, Tensor3(24, 24, 6), 0.01, 5));
    write_raw(dir.path / "s2.fdr", composite(clean, Tensor3(24, 24, 6), 0.02, 5));
    RunResult a = run_cli("metrics --ref " + (dir.path / "clean.fdr").string() + " --test " +
                              (dir.path / "s1.fdr").string(),
                          dir.path);
    RunResult b = run_cli("metrics --ref " + (dir.path / "clean.fdr").string() + " --test " +
                              (dir.path / "s2.fdr").string(),
                          dir.path);
    EXPECT_LT(parse_kv(b.out, "psnr"), parse_kv(a.out, "psnr"));
}

TEST(Cli, SimulateCompositeAndFramesPipeline) {
    TempDir dir;
    // gray frame directory in, frame directory out
    Tensor3 clean = scenes::moving_gradient_background(24, 24, 4);
    write_frames(dir.path / "clean", clean);
    RunResult sim = run_cli("simulate --clean " + (dir.path / "clean").string() +
                                " --density 0.02 --length 6 --angle-mode fixed:0 --intensity 0.6"
                                " --seed 7 --out-rainy " +
                                (dir.path / "rainy").string(),
                            dir.path);
    ASSERT_EQ(sim.code, 0) << sim.err;
    RunResult dr = run_cli("derain --input " + (dir.path / "rainy").string() + " --angle 0" +
                               " --out-bg " + (dir.path / "bg").string() + " --out-rain " +
                               (dir.path / "rain").string(),
                           dir.path);
    ASSERT_EQ(dr.code, 0) << dr.err;
    ASSERT_TRUE(fs::is_directory(dir.path / "bg"));
    LoadedVideo bg = read_frames(dir.path / "bg");
    EXPECT_FALSE(bg.is_color);
    EXPECT_EQ(bg.gray.rows(), 24);
    EXPECT_EQ(bg.gray.frames(), 4);
}

TEST(Cli, ColorFramesKeepChromaAndImprove) {
    TempDir dir;
    // colorize the moving gradient, add rain on the luma via simulate
    Tensor3 y = scenes::moving_gradient_background(24, 24, 4);
    Tensor3 u = Tensor3::constant(24, 24, 4, 0.45);
    Tensor3 v = Tensor3::constant(24, 24, 4, 0.55);
    ColorVideo clean = yuv_to_rgb(y, u, v);
    write_frames(dir.path / "clean", clean);
    RunResult sim = run_cli("simulate --clean " + (dir.path / "clean").string() +
                                " --density 0.02 --length 6 --angle-mode fixed:0 --intensity 0.5"
                                " --seed 9 --out-rainy " +
                                (dir.path / "rainy").string(),
                            dir.path);
    ASSERT_EQ(sim.code, 0) << sim.err;
    RunResult dr = run_cli("derain --input " + (dir.path / "rainy").string() + " --angle 0" +
                               " --max-iter 200 --out-bg " + (dir.path / "bg").string(),
                           dir.path);
    ASSERT_EQ(dr.code, 0) << dr.err;
    LoadedVideo bg = read_frames(dir.path / "bg");
    ASSERT_TRUE(bg.is_color);
    // luma improves toward the clean video
    YuvVideo clean_yuv = rgb_to_yuv(clean);
    YuvVideo rainy_yuv = rgb_to_yuv(*read_frames(dir.path / "rainy").color);
    YuvVideo restored_yuv = rgb_to_yuv(*bg.color);
    EXPECT_GT(psnr(clean_yuv.y, restored_yuv.y), psnr(clean_yuv.y, rainy_yuv.y));
}
