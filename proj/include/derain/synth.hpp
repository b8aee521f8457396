#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "derain/rng.hpp"
#include "derain/tensor.hpp"

namespace derain {

/// How streak angles vary across the generated volume.
///
/// PerFrame: every streak in frame k uses angles[k] (a single entry
/// broadcasts to all frames) -- covers constant-angle rain and the
/// angle-drifting-with-time protocol. UniformPerStreak: each streak draws
/// its own angle uniformly from [lo, hi].
struct AngleModel {
    enum class Kind { PerFrame, UniformPerStreak };
    Kind kind = Kind::PerFrame;
    std::vector<double> angles{0.0};
    double lo = 0.0, hi = 0.0;

    static AngleModel fixed(double theta) { return {Kind::PerFrame, {theta}, 0, 0}; }

    /// per-frame angles sweeping linearly from lo to hi over the video
    static AngleModel sweep(double lo, double hi, int frames) {
        AngleModel m;
        m.kind = Kind::PerFrame;
        m.angles.resize(frames);
        for (int k = 0; k < frames; ++k)
            m.angles[k] = frames > 1 ? lo + (hi - lo) * k / (frames - 1) : 0.5 * (lo + hi);
        return m;
    }

    static AngleModel uniform(double lo, double hi) {
        AngleModel m;
        m.kind = Kind::UniformPerStreak;
        m.lo = lo;
        m.hi = hi;
        return m;
    }
};

/// Streak generation parameters. density is the fraction of seed dots per
/// frame, length the streak extent in pixels, intensity the peak brightness
/// after scaling.
struct RainSpec {
    double density = 0.01;
    int length = 8;
    AngleModel angle = AngleModel::fixed(0.0);
    double intensity = 0.5;
    std::uint64_t seed = 0;

    void validate(int frames) const {
        if (!(density > 0.0 && density < 1.0))
            throw DomainError("RainSpec: density must lie in (0, 1)");
        if (length < 2) throw DomainError("RainSpec: length must be at least 2");
        if (!(intensity >= 0.0 && intensity <= 1.0))
            throw DomainError("RainSpec: intensity must lie in [0, 1]");
        auto check = [](double a) {
            if (!(a > -90.0 && a < 90.0))
                throw DomainError("RainSpec: angles must lie in (-90, 90)");
        };
        if (angle.kind == AngleModel::Kind::PerFrame) {
            if (angle.angles.size() != 1 && angle.angles.size() != static_cast<std::size_t>(frames))
                throw DomainError("RainSpec: per-frame angle list must have 1 or t entries");
            for (double a : angle.angles) check(a);
        } else {
            check(angle.lo);
            check(angle.hi);
            if (angle.lo > angle.hi) throw DomainError("RainSpec: angle range is empty");
        }
    }
};

namespace detail {
// deposits w at real-valued position with a gaussian cross-profile across
// the minor axis and a bilinear split along the major one
inline void splat_profile(Frame& f, double major, double minor, double w, bool major_is_row) {
    constexpr double sigma = 0.8;
    constexpr int reach = 2;
    const int b_major = static_cast<int>(std::floor(major));
    const double f_major = major - b_major;
    const int c_minor = static_cast<int>(std::lround(minor));
    double taps[2 * reach + 1];
    double total = 0.0;
    for (int q = -reach; q <= reach; ++q) {
        const double d = (c_minor + q) - minor;
        taps[q + reach] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += taps[q + reach];
    }
    for (int dq = 0; dq <= 1; ++dq) {
        const double wm = dq == 0 ? (1 - f_major) : f_major;
        for (int q = -reach; q <= reach; ++q) {
            const int i = major_is_row ? b_major + dq : c_minor + q;
            const int j = major_is_row ? c_minor + q : b_major + dq;
            if (i >= 0 && i < f.rows && j >= 0 && j < f.cols)
                f.at(i, j) += w * wm * taps[q + reach] / total;
        }
    }
}

// Stamps one streak: a smooth oriented line of the given length through the
// seed, direction (cos theta, -sin theta) in (row, col) coordinates, so
// positive angles drift left going down and a right row shift straightens
// them. Samples step one pixel along the dominant axis and spread a gaussian
// cross-profile across the other, mimicking motion-blurred dots. Thin
// hard-rounded stamps alias under rotation badly enough to blind the angle
// sweep at shallow angles.
inline void stamp_streak(Frame& f, double i0, double j0, double theta_deg, int length,
                         double amplitude) {
    const double rad = theta_deg * std::numbers::pi / 180.0;
    const double w = amplitude / length;
    if (std::abs(theta_deg) <= 45.0) {
        const double col_per_row = -std::tan(rad);
        for (int s = 0; s < length; ++s)
            splat_profile(f, i0 + s, j0 + s * col_per_row, w, true);
    } else {
        const double step_j = -(std::sin(rad) > 0 ? 1.0 : -1.0);
        const double row_per_col = std::cos(rad) / std::abs(std::sin(rad));
        for (int s = 0; s < length; ++s)
            splat_profile(f, j0 + s * step_j, i0 + s * row_per_col, w, false);
    }
}
} // namespace detail

/// Procedural rain layer: per frame, ceil(density*m*n) seed dots of uniform
/// random amplitude are smeared into oriented line segments, the volume is
/// scaled so its peak equals the requested intensity, and clamped to [0,1].
/// Frames are statistically independent; a fixed seed fixes the output.
inline Tensor3 simulate_rain(int rows, int cols, int frames, const RainSpec& spec) {
    spec.validate(frames);
    Tensor3 rain(rows, cols, frames);
    const int seeds = static_cast<int>(std::ceil(spec.density * rows * cols));
    const Rng root(spec.seed);
    double peak = 0.0;
    for (int k = 0; k < frames; ++k) {
        Rng rng = root.fork(static_cast<std::uint64_t>(k));
        Frame f(rows, cols);
        const double frame_angle =
            spec.angle.kind == AngleModel::Kind::PerFrame
                ? (spec.angle.angles.size() == 1 ? spec.angle.angles[0]
                                                 : spec.angle.angles[static_cast<std::size_t>(k)])
                : 0.0;
        for (int s = 0; s < seeds; ++s) {
            const double i0 = rng.uniform(0.0, rows - 1.0);
            const double j0 = rng.uniform(0.0, cols - 1.0);
            const double amp = rng.uniform(0.5, 1.0);
            const double theta = spec.angle.kind == AngleModel::Kind::UniformPerStreak
                                     ? rng.uniform(spec.angle.lo, spec.angle.hi)
                                     : frame_angle;
            detail::stamp_streak(f, i0, j0, theta, spec.length, amp);
        }
        set_frame(rain, k, f);
        for (double v : f.v) peak = std::max(peak, v);
    }
    if (peak > 0.0) {
        const double scale = spec.intensity / peak;
        double* p = rain.data();
        for (std::size_t q = 0; q < rain.size(); ++q)
            p[q] = std::min(p[q] * scale, 1.0);
    }
    return rain;
}

/// O = clamp_[0,1](B + R + gaussian(0, sigma)); deterministic for a fixed seed.
inline Tensor3 composite(const Tensor3& background, const Tensor3& rain, double noise_sigma,
                         std::uint64_t seed) {
    background.require_same_dims(rain, "composite");
    if (noise_sigma < 0.0) throw DomainError("composite: noise sigma must be nonnegative");
    Tensor3 out = background;
    out += rain;
    double* p = out.data();
    if (noise_sigma > 0.0) {
        Rng rng(seed);
        for (std::size_t q = 0; q < out.size(); ++q) p[q] += noise_sigma * rng.gaussian();
    }
    for (std::size_t q = 0; q < out.size(); ++q) p[q] = std::min(std::max(p[q], 0.0), 1.0);
    return out;
}

} // namespace derain
