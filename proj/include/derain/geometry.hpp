#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "derain/tensor.hpp"

namespace derain {

/// Result of the angle sweep: the argmin angle and the full curve y(theta).
struct AngleEstimate {
    double theta_hat = 0.0;
    std::vector<std::pair<double, double>> curve; // (theta_deg, y)
};

enum class ShiftMode { None, ShiftI, ShiftII };

/// Geometric normalization mapping oblique streaks to near-vertical ones.
///
/// Applied as: left-right flip, then transpose, then a circular right shift
/// of every row. All three are permutations of pixels, so the plan inverts
/// exactly. ShiftI slides row i (1-indexed) by i-1 pixels, undoing streaks
/// near 45 degrees; ShiftII slides by floor((i-1)/2) for the 15..35 band.
struct ShiftPlan {
    bool flip_lr = false;
    bool transpose = false;
    ShiftMode shift_mode = ShiftMode::None;

    /// Right displacement of the given (0-indexed) row.
    int row_offset(int row) const {
        switch (shift_mode) {
            case ShiftMode::ShiftI: return row;
            case ShiftMode::ShiftII: return row / 2;
            default: return 0;
        }
    }

    bool identity() const {
        return !flip_lr && !transpose && shift_mode == ShiftMode::None;
    }
};

/// High-pass residual isolating streak candidates: each horizontal slice
/// O(i,:,:) (an n x t image) is filtered with a 3x3 median using replicate
/// border padding, and the filtered volume is subtracted from O.
inline Tensor3 median_residual(const Tensor3& O) {
    const int m = O.rows(), n = O.cols(), t = O.frames();
    if (n < 3 || t < 3)
        throw DimensionError("median_residual: needs at least 3 columns and 3 frames");
    Tensor3 out(m, n, t);
    double window[9];
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < t; ++k) {
                int w = 0;
                for (int dj = -1; dj <= 1; ++dj) {
                    const int jj = std::clamp(j + dj, 0, n - 1);
                    for (int dk = -1; dk <= 1; ++dk) {
                        const int kk = std::clamp(k + dk, 0, t - 1);
                        window[w++] = O(i, jj, kk);
                    }
                }
                std::nth_element(window, window + 4, window + 9);
                out(i, j, k) = O(i, j, k) - window[4];
            }
        }
    }
    return out;
}

/// A rotated frame together with the mask of pixels whose source sample fell
/// inside the original frame (zero fill elsewhere).
struct RotatedFrame {
    Frame image;
    std::vector<std::uint8_t> valid;
};

/// Rotates the frame about its center with bilinear interpolation.
///
/// Angles are measured from the vertical axis; a feature inclined phi degrees
/// comes out inclined phi + theta. Output dimensions match the input.
inline RotatedFrame rotate_frame(const Frame& frame, double theta_deg) {
    if (std::abs(theta_deg) > 90.0 + 1e-9)
        throw DomainError("rotate_frame: |theta| must be at most 90 degrees");
    const int m = frame.rows, n = frame.cols;
    const double ci = 0.5 * (m - 1), cj = 0.5 * (n - 1);
    const double rad = theta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    RotatedFrame out;
    out.image = Frame(m, n);
    out.valid.assign(static_cast<std::size_t>(m) * n, 0);
    constexpr double edge = 1e-9; // exact grid angles land on the boundary
    for (int io = 0; io < m; ++io) {
        const double di = io - ci;
        for (int jo = 0; jo < n; ++jo) {
            const double dj = jo - cj;
            double si = ci + c * di - s * dj;
            double sj = cj + s * di + c * dj;
            if (si < -edge || si > m - 1 + edge || sj < -edge || sj > n - 1 + edge) continue;
            si = std::clamp(si, 0.0, static_cast<double>(m - 1));
            sj = std::clamp(sj, 0.0, static_cast<double>(n - 1));
            const int i0 = static_cast<int>(si);
            const int j0 = static_cast<int>(sj);
            const int i1 = std::min(i0 + 1, m - 1);
            const int j1 = std::min(j0 + 1, n - 1);
            const double fi = si - i0, fj = sj - j0;
            const double v = (1 - fi) * ((1 - fj) * frame.at(i0, j0) + fj * frame.at(i0, j1)) +
                             fi * ((1 - fj) * frame.at(i1, j0) + fj * frame.at(i1, j1));
            out.image.at(io, jo) = v;
            out.valid[static_cast<std::size_t>(io) * n + jo] = 1;
        }
    }
    return out;
}

namespace detail {
struct MaskedL1 {
    double sum = 0.0;
    long pairs = 0;
};

// l1 norm of the vertical forward difference restricted to pixel pairs whose
// samples are both valid, so the zero fill outside the rotated support does
// not bias the sweep. The pair count comes along so the sweep can normalize:
// the valid region shrinks with |theta|, and a raw sum would drag the argmin
// toward steep candidates regardless of content.
inline MaskedL1 masked_vertical_l1(const RotatedFrame& rf) {
    const int m = rf.image.rows, n = rf.image.cols;
    MaskedL1 out;
    for (int i = 0; i + 1 < m; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            if (rf.valid[p] && rf.valid[p + n]) {
                out.sum += std::abs(rf.image.at(i + 1, j) - rf.image.at(i, j));
                out.pairs += 1;
            }
        }
    return out;
}
} // namespace detail

/// Sweeps candidate angles at 1-degree steps and returns the angle whose
/// un-rotated median residual has the smallest vertical-gradient l1 norm.
/// Ties break toward the smaller |theta|. frame_stride > 1 subsamples the
/// frames entering the sweep.
inline AngleEstimate detect_angle(const Tensor3& O, int sweep_lo = -89, int sweep_hi = 89,
                                  int frame_stride = 1) {
    if (sweep_lo > sweep_hi) throw DomainError("detect_angle: empty sweep range");
    if (sweep_lo <= -90 || sweep_hi >= 90)
        throw DomainError("detect_angle: sweep must stay within (-90, 90)");
    if (frame_stride < 1) throw DomainError("detect_angle: frame stride must be positive");
    const Tensor3 residual = median_residual(O);
    std::vector<Frame> frames;
    for (int k = 0; k < O.frames(); k += frame_stride)
        frames.push_back(extract_frame(residual, k));

    AngleEstimate est;
    double best = 0.0;
    bool first = true;
    for (int theta = sweep_lo; theta <= sweep_hi; ++theta) {
        double sum = 0.0;
        long pairs = 0;
        for (const Frame& f : frames) {
            const auto l1 = detail::masked_vertical_l1(rotate_frame(f, -static_cast<double>(theta)));
            sum += l1.sum;
            pairs += l1.pairs;
        }
        const double y = pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
        est.curve.emplace_back(static_cast<double>(theta), y);
        const bool better =
            first || y < best ||
            (y == best && std::abs(theta) < std::abs(est.theta_hat));
        if (better) {
            best = y;
            est.theta_hat = theta;
            first = false;
        }
    }
    return est;
}

/// Chooses the flip/transpose/shift combination that maps streaks at the
/// detected angle into the near-vertical regime the solver expects.
inline ShiftPlan plan_normalization(double theta_hat) {
    if (!(theta_hat > -90.0 && theta_hat < 90.0))
        throw DomainError("plan_normalization: angle must lie in (-90, 90)");
    ShiftPlan plan;
    double theta = theta_hat;
    if (theta < 0.0) {
        plan.flip_lr = true;
        theta = -theta;
    }
    if (theta > 45.0) {
        plan.transpose = true;
        theta = 90.0 - theta;
    }
    if (theta >= 35.0)
        plan.shift_mode = ShiftMode::ShiftI;
    else if (theta >= 15.0)
        plan.shift_mode = ShiftMode::ShiftII;
    return plan;
}

namespace detail {
inline Tensor3 flip_lr(const Tensor3& x) {
    Tensor3 out(x.rows(), x.cols(), x.frames());
    for (int k = 0; k < x.frames(); ++k)
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) out(i, x.cols() - 1 - j, k) = x(i, j, k);
    return out;
}

inline Tensor3 transpose_frames(const Tensor3& x) {
    Tensor3 out(x.cols(), x.rows(), x.frames());
    for (int k = 0; k < x.frames(); ++k)
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) out(j, i, k) = x(i, j, k);
    return out;
}

inline Tensor3 shift_rows(const Tensor3& x, const ShiftPlan& plan, int sign) {
    Tensor3 out(x.rows(), x.cols(), x.frames());
    const int n = x.cols();
    for (int i = 0; i < x.rows(); ++i) {
        const int off = ((sign * plan.row_offset(i)) % n + n) % n;
        for (int k = 0; k < x.frames(); ++k)
            for (int j = 0; j < n; ++j) out(i, (j + off) % n, k) = x(i, j, k);
    }
    return out;
}
} // namespace detail

/// Flip, transpose, then circular row shifts, in that order.
inline Tensor3 apply_plan(const Tensor3& x, const ShiftPlan& plan) {
    Tensor3 out = x;
    if (plan.flip_lr) out = detail::flip_lr(out);
    if (plan.transpose) out = detail::transpose_frames(out);
    if (plan.shift_mode != ShiftMode::None) out = detail::shift_rows(out, plan, +1);
    return out;
}

/// Exact inverse of apply_plan; invert_plan(apply_plan(x)) == x bitwise.
inline Tensor3 invert_plan(const Tensor3& x, const ShiftPlan& plan) {
    Tensor3 out = x;
    if (plan.shift_mode != ShiftMode::None) out = detail::shift_rows(out, plan, -1);
    if (plan.transpose) out = detail::transpose_frames(out);
    if (plan.flip_lr) out = detail::flip_lr(out);
    return out;
}

} // namespace derain
