#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "derain/tensor.hpp"

namespace derain {

/// Peak signal-to-noise ratio over the full volume, in dB. Identical inputs
/// give +infinity.
inline double psnr(const Tensor3& reference, const Tensor3& test, double peak = 1.0) {
    reference.require_same_dims(test, "psnr");
    if (!(peak > 0.0)) throw DomainError("psnr: peak must be positive");
    double mse = 0.0;
    const double* a = reference.data();
    const double* b = test.data();
    for (std::size_t p = 0; p < reference.size(); ++p) {
        const double d = a[p] - b[p];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace detail {
// 11x11 Gaussian window, sigma 1.5, normalized to unit sum.
inline const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> win(121);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i)
            for (int j = 0; j < 11; ++j) {
                const double di = i - 5, dj = j - 5;
                win[static_cast<std::size_t>(i) * 11 + j] =
                    std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
                sum += win[static_cast<std::size_t>(i) * 11 + j];
            }
        for (double& v : win) v /= sum;
        return win;
    }();
    return w;
}
} // namespace detail

/// Structural similarity of two frames in [0,1]: 11x11 Gaussian window with
/// sigma 1.5, stability constants C1 = (0.01*peak)^2 and C2 = (0.03*peak)^2,
/// averaged over all fully-interior window positions.
inline double ssim_frame(const Frame& reference, const Frame& test, double peak = 1.0) {
    if (reference.rows != test.rows || reference.cols != test.cols)
        throw DimensionError("ssim_frame: frame dimensions differ");
    if (reference.rows < 11 || reference.cols < 11)
        throw DimensionError("ssim_frame: frame smaller than the 11x11 window");
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const std::vector<double>& win = detail::ssim_window();
    const int m = reference.rows, n = reference.cols;
    double total = 0.0;
    int count = 0;
    for (int i = 0; i + 11 <= m; ++i) {
        for (int j = 0; j + 11 <= n; ++j) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int wi = 0; wi < 11; ++wi)
                for (int wj = 0; wj < 11; ++wj) {
                    const double w = win[static_cast<std::size_t>(wi) * 11 + wj];
                    const double x = reference.at(i + wi, j + wj);
                    const double y = test.at(i + wi, j + wj);
                    mx += w * x;
                    my += w * y;
                    sxx += w * x * x;
                    syy += w * y * y;
                    sxy += w * x * y;
                }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cov = sxy - mx * my;
            total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / count;
}

/// Whole-video PSNR plus the per-frame SSIM list and its mean.
struct QualityReport {
    double psnr = 0.0;
    double ssim_mean = 0.0;
    std::vector<double> ssim_per_frame;

    std::string to_kv() const {
        std::ostringstream os;
        os << "psnr=" << psnr << "\n";
        os << "ssim_mean=" << ssim_mean << "\n";
        for (std::size_t k = 0; k < ssim_per_frame.size(); ++k)
            os << "ssim_frame_" << k << "=" << ssim_per_frame[k] << "\n";
        return os.str();
    }

    static std::string csv_header() { return "psnr,ssim_mean"; }

    std::string to_csv_row() const {
        std::ostringstream os;
        os << psnr << "," << ssim_mean;
        return os.str();
    }
};

inline QualityReport evaluate_quality(const Tensor3& reference, const Tensor3& test,
                                      double peak = 1.0) {
    QualityReport report;
    report.psnr = psnr(reference, test, peak);
    for (int k = 0; k < reference.frames(); ++k) {
        report.ssim_per_frame.push_back(
            ssim_frame(extract_frame(reference, k), extract_frame(test, k), peak));
    }
    double sum = 0.0;
    for (double v : report.ssim_per_frame) sum += v;
    report.ssim_mean = report.ssim_per_frame.empty()
                           ? 0.0
                           : sum / static_cast<double>(report.ssim_per_frame.size());
    return report;
}

} // namespace derain
