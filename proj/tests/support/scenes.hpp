#pragma once

// Shared synthetic scenes for the solver regression and acceptance suites.

#include <cmath>
#include <numbers>

#include "derain/synth.hpp"
#include "derain/tensor.hpp"

namespace scenes {

/// Smooth background whose gradient pattern sways over time. Periodic in
/// every axis (seamless under the circular boundary) with a per-frame motion
/// small enough to mimic ordinary video, unlike the frame-rate-independent
/// streaks laid on top.
inline derain::Tensor3 moving_gradient_background(int m, int n, int t) {
    derain::Tensor3 b(m, n, t);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < t; ++k) {
        const double drift = 0.15 * std::sin(two_pi * k / t);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                b(i, j, k) = 0.45 + 0.25 * std::sin(two_pi * j / n + drift) +
                             0.15 * std::cos(two_pi * i / m + 0.5 * drift);
    }
    return b;
}

struct RainyScene {
    derain::Tensor3 truth; // clean background
    derain::Tensor3 rain;
    derain::Tensor3 observed;
};

/// Fixed-seed scene: moving-gradient background plus streaks at the given
/// angle, optionally with gaussian noise.
inline RainyScene make_scene(int m, int n, int t, double angle_deg, double density = 0.02,
                             double noise_sigma = 0.0) {
    RainyScene s;
    s.truth = moving_gradient_background(m, n, t);
    derain::RainSpec spec;
    spec.density = density;
    spec.length = 6;
    spec.angle = derain::AngleModel::fixed(angle_deg);
    spec.intensity = 0.6;
    spec.seed = 7;
    s.rain = derain::simulate_rain(m, n, t, spec);
    s.observed = derain::composite(s.truth, s.rain, noise_sigma, 9);
    return s;
}

/// Streaks on a flat mid-gray background; the detection tests use this.
/// Length 16 on a 64x64x6 volume puts the sweep minimum exactly on the
/// streak angle at the grid angles (0, +-45); length 20 widens the basin
/// enough to hold +-2 degrees over the whole [-60, 60] range.
inline derain::Tensor3 flat_with_streaks(int m, int n, int t, double angle_deg,
                                         double density = 0.006, int length = 16) {
    derain::RainSpec spec;
    spec.density = density;
    spec.length = length;
    spec.angle = derain::AngleModel::fixed(angle_deg);
    spec.intensity = 0.7;
    spec.seed = 21;
    derain::Tensor3 rain = derain::simulate_rain(m, n, t, spec);
    return derain::composite(derain::Tensor3::constant(m, n, t, 0.2), rain, 0.0, 3);
}

} // namespace scenes
