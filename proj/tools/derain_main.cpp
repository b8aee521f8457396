// Command-line front end: batch deraining, angle detection, rain synthesis
// and quality metrics over raw tensors or PGM/PPM frame directories.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "derain/geometry.hpp"
#include "derain/metrics.hpp"
#include "derain/pipeline.hpp"
#include "derain/solver.hpp"
#include "derain/synth.hpp"
#include "derain/tensor.hpp"
#include "derain/videoio.hpp"

namespace fs = std::filesystem;
using namespace derain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

struct Input {
    bool color = false;
    Tensor3 y, u, v; // gray inputs populate y only
    bool from_frames = false;
};

Input load_input(const std::string& path, const std::string& format) {
    const bool frames = format == "frames" || (format == "auto" && fs::is_directory(path));
    Input in;
    in.from_frames = frames;
    if (!frames) {
        in.y = read_raw(path);
        return in;
    }
    LoadedVideo video = read_frames(path);
    if (video.is_color) {
        in.color = true;
        YuvVideo yuv = rgb_to_yuv(*video.color);
        in.y = std::move(yuv.y);
        in.u = std::move(yuv.u);
        in.v = std::move(yuv.v);
    } else {
        in.y = std::move(video.gray);
    }
    return in;
}

void write_gray(const std::string& path, const Tensor3& x, bool as_frames) {
    if (as_frames)
        write_frames(fs::path(path), x);
    else
        write_raw(path, x);
}

void write_like_input(const std::string& path, const Input& in, const Tensor3& new_y) {
    if (in.color) {
        write_frames(fs::path(path), yuv_to_rgb(new_y, in.u, in.v));
    } else {
        write_gray(path, new_y, in.from_frames);
    }
}

std::array<int, 3> parse_dims(const std::string& spec) {
    int m = 0, n = 0, t = 0;
    if (std::sscanf(spec.c_str(), "%dx%dx%d", &m, &n, &t) != 3 || m <= 0 || n <= 0 || t <= 0)
        throw CLI::ValidationError("--dims", "expected MxNxT with positive integers");
    return {m, n, t};
}

AngleModel parse_angle_mode(const std::string& spec, int frames) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    double a = 0, b = 0;
    if (kind == "fixed") {
        if (std::sscanf(args.c_str(), "%lf", &a) != 1)
            throw CLI::ValidationError("--angle-mode", "expected fixed:DEG");
        return AngleModel::fixed(a);
    }
    if (kind == "sweep") {
        if (std::sscanf(args.c_str(), "%lf,%lf", &a, &b) != 2)
            throw CLI::ValidationError("--angle-mode", "expected sweep:LO,HI");
        return AngleModel::sweep(a, b, frames);
    }
    if (kind == "range") {
        if (std::sscanf(args.c_str(), "%lf,%lf", &a, &b) != 2)
            throw CLI::ValidationError("--angle-mode", "expected range:LO,HI");
        return AngleModel::uniform(a, b);
    }
    throw CLI::ValidationError("--angle-mode", "unknown mode: " + kind);
}

struct DerainOptions {
    std::string input, out_bg, out_rain;
    std::vector<double> alpha{0.01, 1e-5, 1e-5, 0.01};
    double mu = 1.0;
    double tol = 1e-4;
    int max_iter = 100;
    bool auto_angle = false;
    double fixed_angle = 0.0;
    bool has_fixed_angle = false;
    std::string shrink = "signed";
    std::string format = "auto";
    int detect_stride = 1;
};

int run_derain(const DerainOptions& opt) {
    SolverParams params;
    if (opt.alpha.size() != 4)
        throw DomainError("--alpha needs exactly four comma-separated values");
    std::copy(opt.alpha.begin(), opt.alpha.end(), params.alpha.begin());
    params.mu = opt.mu;
    params.tol = opt.tol;
    params.max_iter = opt.max_iter;
    params.mode = opt.shrink == "paper" ? ShrinkMode::OneSided : ShrinkMode::Signed;
    params.validate();

    Input in = load_input(opt.input, opt.format);

    AngleChoice angle;
    angle.auto_detect = !opt.has_fixed_angle;
    angle.fixed_angle = opt.fixed_angle;
    angle.detect_stride = opt.detect_stride;

    PipelineResult result = derain_normalized(in.y, params, angle);

    if (!opt.out_bg.empty()) write_like_input(opt.out_bg, in, result.solve.B);
    if (!opt.out_rain.empty()) write_gray(opt.out_rain, result.solve.R, in.from_frames);

    std::cout << "angle_deg=" << result.theta << "\n";
    std::cout << "iterations=" << result.solve.iterations << "\n";
    std::cout << "converged=" << (result.solve.converged ? 1 : 0) << "\n";
    if (!result.solve.history.empty()) {
        const IterationRecord& last = result.solve.history.back();
        std::cout << "rel_change=" << last.rel_change << "\n";
        for (int i = 0; i < 4; ++i)
            std::cout << "residual_" << (i + 1) << "=" << last.residual[i] << "\n";
    }
    return kExitOk;
}

struct DetectOptions {
    std::string input;
    std::string format = "auto";
    int sweep_lo = -89, sweep_hi = 89;
    int stride = 1;
    std::string curve_csv;
};

int run_detect(const DetectOptions& opt) {
    Input in = load_input(opt.input, opt.format);
    AngleEstimate est = detect_angle(in.y, opt.sweep_lo, opt.sweep_hi, opt.stride);
    std::cout << "theta_hat=" << est.theta_hat << "\n";
    if (!opt.curve_csv.empty()) {
        std::ofstream os(opt.curve_csv, std::ios::trunc);
        if (!os) throw IoError("cannot open for writing: " + opt.curve_csv);
        os << "theta_deg,y\n";
        for (const auto& [theta, y] : est.curve) os << theta << "," << y << "\n";
    }
    return kExitOk;
}

struct SimulateOptions {
    std::string dims;
    double density = 0.01;
    int length = 8;
    std::string angle_mode = "fixed:0";
    double intensity = 0.5;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string clean, out_rain, out_rainy;
    std::string format = "auto";
};

int run_simulate(const SimulateOptions& opt) {
    std::optional<Input> clean;
    int m, n, t;
    if (!opt.clean.empty()) {
        clean = load_input(opt.clean, opt.format);
        m = clean->y.rows();
        n = clean->y.cols();
        t = clean->y.frames();
    } else {
        if (opt.dims.empty())
            throw DomainError("simulate needs --dims when no --clean video is given");
        const auto d = parse_dims(opt.dims);
        m = d[0];
        n = d[1];
        t = d[2];
    }

    RainSpec spec;
    spec.density = opt.density;
    spec.length = opt.length;
    spec.angle = parse_angle_mode(opt.angle_mode, t);
    spec.intensity = opt.intensity;
    spec.seed = opt.seed;

    Tensor3 rain = simulate_rain(m, n, t, spec);
    if (!opt.out_rain.empty())
        write_gray(opt.out_rain, rain, clean ? clean->from_frames : false);
    if (clean) {
        if (opt.out_rainy.empty()) throw DomainError("simulate with --clean needs --out-rainy");
        Tensor3 rainy_y = composite(clean->y, rain, opt.sigma, opt.seed ^ 0x5DEECE66Dull);
        write_like_input(opt.out_rainy, *clean, rainy_y);
    }
    std::cout << "frames=" << t << "\n";
    std::cout << "seeds_per_frame=" << static_cast<int>(std::ceil(opt.density * m * n)) << "\n";
    return kExitOk;
}

struct MetricsOptions {
    std::string ref, test;
    std::string format = "auto";
    std::string csv;
    bool csv_stdout = false;
};

int run_metrics(const MetricsOptions& opt) {
    Input ref = load_input(opt.ref, opt.format);
    Input test = load_input(opt.test, opt.format);
    QualityReport report = evaluate_quality(ref.y, test.y);
    std::cout << report.to_kv();
    if (opt.csv_stdout) std::cout << QualityReport::csv_header() << "\n" << report.to_csv_row() << "\n";
    if (!opt.csv.empty()) {
        std::ofstream os(opt.csv, std::ios::trunc);
        if (!os) throw IoError("cannot open for writing: " + opt.csv);
        os << QualityReport::csv_header() << "\n" << report.to_csv_row() << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"video rain streak removal via directional-gradient optimization"};
    app.require_subcommand(1);

    DerainOptions dopt;
    CLI::App* cmd_derain = app.add_subcommand("derain", "remove rain streaks from a video");
    cmd_derain->add_option("--input", dopt.input, "input video (raw tensor or frame directory)")
        ->required();
    cmd_derain->add_option("--out-bg", dopt.out_bg, "output path for the rain-free background");
    cmd_derain->add_option("--out-rain", dopt.out_rain, "output path for the extracted rain layer");
    cmd_derain->add_option("--alpha", dopt.alpha, "four regularizer weights")->delimiter(',')->expected(4);
    cmd_derain->add_option("--mu", dopt.mu, "augmented Lagrangian weight");
    cmd_derain->add_option("--tol", dopt.tol, "relative-change stopping threshold");
    cmd_derain->add_option("--max-iter", dopt.max_iter, "iteration cap");
    CLI::Option* auto_flag = cmd_derain->add_flag("--auto-angle", dopt.auto_angle,
                                                  "detect the streak angle (default)");
    CLI::Option* angle_opt =
        cmd_derain->add_option("--angle", dopt.fixed_angle, "fixed streak angle in degrees");
    angle_opt->excludes(auto_flag);
    auto_flag->excludes(angle_opt);
    cmd_derain->add_option("--shrink", dopt.shrink, "shrinkage variant")
        ->check(CLI::IsMember({"signed", "paper"}));
    cmd_derain->add_option("--format", dopt.format, "input format")
        ->check(CLI::IsMember({"auto", "raw", "frames"}));
    cmd_derain->add_option("--detect-stride", dopt.detect_stride,
                           "use every Nth frame for angle detection");

    DetectOptions eopt;
    CLI::App* cmd_detect = app.add_subcommand("detect-angle", "estimate the streak angle");
    cmd_detect->add_option("--input", eopt.input, "input video")->required();
    cmd_detect->add_option("--format", eopt.format, "input format")
        ->check(CLI::IsMember({"auto", "raw", "frames"}));
    cmd_detect->add_option("--sweep-lo", eopt.sweep_lo, "sweep start (degrees)");
    cmd_detect->add_option("--sweep-hi", eopt.sweep_hi, "sweep end (degrees)");
    cmd_detect->add_option("--detect-stride", eopt.stride, "use every Nth frame");
    cmd_detect->add_option("--curve-csv", eopt.curve_csv, "write the sweep curve as CSV");

    SimulateOptions sopt;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "generate synthetic rain streaks");
    cmd_sim->add_option("--dims", sopt.dims, "volume size as MxNxT");
    cmd_sim->add_option("--density", sopt.density, "seed dots per pixel");
    cmd_sim->add_option("--length", sopt.length, "streak length in pixels");
    cmd_sim->add_option("--angle-mode", sopt.angle_mode, "fixed:DEG | sweep:LO,HI | range:LO,HI");
    cmd_sim->add_option("--intensity", sopt.intensity, "peak streak brightness");
    cmd_sim->add_option("--sigma", sopt.sigma, "gaussian noise level for compositing");
    cmd_sim->add_option("--seed", sopt.seed, "random seed");
    cmd_sim->add_option("--clean", sopt.clean, "clean background video to composite onto");
    cmd_sim->add_option("--out-rain", sopt.out_rain, "output path for the rain layer");
    cmd_sim->add_option("--out-rainy", sopt.out_rainy, "output path for the composited video");
    cmd_sim->add_option("--format", sopt.format, "input format of --clean")
        ->check(CLI::IsMember({"auto", "raw", "frames"}));

    MetricsOptions mopt;
    CLI::App* cmd_metrics = app.add_subcommand("metrics", "PSNR and per-frame SSIM");
    cmd_metrics->add_option("--ref", mopt.ref, "reference video")->required();
    cmd_metrics->add_option("--test", mopt.test, "video under test")->required();
    cmd_metrics->add_option("--format", mopt.format, "input format")
        ->check(CLI::IsMember({"auto", "raw", "frames"}));
    cmd_metrics->add_option("--csv", mopt.csv, "write psnr/ssim as a CSV row to this path");
    cmd_metrics->add_flag("--csv-stdout", mopt.csv_stdout, "print the CSV row to stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        dopt.has_fixed_angle = angle_opt->count() > 0;
        if (cmd_derain->parsed()) return run_derain(dopt);
        if (cmd_detect->parsed()) return run_detect(eopt);
        if (cmd_sim->parsed()) return run_simulate(sopt);
        if (cmd_metrics->parsed()) return run_metrics(mopt);
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
