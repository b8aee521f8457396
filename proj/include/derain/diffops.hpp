#pragma once

#include <cmath>
#include <numbers>

#include "derain/tensor.hpp"

namespace derain {

/// The three directions a first-difference operator can act along.
enum class Axis { Vertical, Horizontal, Temporal };

inline int axis_extent(const Tensor3& x, Axis a) {
    switch (a) {
        case Axis::Vertical: return x.rows();
        case Axis::Horizontal: return x.cols();
        default: return x.frames();
    }
}

namespace detail {
inline void require_diffable(const Tensor3& x, Axis a) {
    if (axis_extent(x, a) < 2)
        throw DimensionError("apply_diff: axis extent must be at least 2");
}
} // namespace detail

/// Forward first difference with periodic boundary along the given axis:
/// e.g. Vertical gives out(i,j,k) = x(i+1 mod m, j, k) - x(i,j,k).
inline Tensor3 apply_diff(const Tensor3& x, Axis axis) {
    detail::require_diffable(x, axis);
    const int m = x.rows(), n = x.cols(), t = x.frames();
    Tensor3 out(m, n, t);
    switch (axis) {
        case Axis::Vertical:
            for (int k = 0; k < t; ++k)
                for (int i = 0; i < m; ++i) {
                    const int in = (i + 1 == m) ? 0 : i + 1;
                    for (int j = 0; j < n; ++j) out(i, j, k) = x(in, j, k) - x(i, j, k);
                }
            break;
        case Axis::Horizontal:
            for (int k = 0; k < t; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) {
                        const int jn = (j + 1 == n) ? 0 : j + 1;
                        out(i, j, k) = x(i, jn, k) - x(i, j, k);
                    }
            break;
        case Axis::Temporal:
            for (int k = 0; k < t; ++k) {
                const int kn = (k + 1 == t) ? 0 : k + 1;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) out(i, j, k) = x(i, j, kn) - x(i, j, k);
            }
            break;
    }
    return out;
}

/// Exact adjoint of apply_diff, derived from the forward convention:
/// out(i,j,k) = y(i-1 mod m, j, k) - y(i,j,k) for the Vertical axis, etc.
/// Satisfies <apply_diff(x,a), y> == <x, apply_diff_adjoint(y,a)> identically.
inline Tensor3 apply_diff_adjoint(const Tensor3& y, Axis axis) {
    detail::require_diffable(y, axis);
    const int m = y.rows(), n = y.cols(), t = y.frames();
    Tensor3 out(m, n, t);
    switch (axis) {
        case Axis::Vertical:
            for (int k = 0; k < t; ++k)
                for (int i = 0; i < m; ++i) {
                    const int ip = (i == 0) ? m - 1 : i - 1;
                    for (int j = 0; j < n; ++j) out(i, j, k) = y(ip, j, k) - y(i, j, k);
                }
            break;
        case Axis::Horizontal:
            for (int k = 0; k < t; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) {
                        const int jp = (j == 0) ? n - 1 : j - 1;
                        out(i, j, k) = y(i, jp, k) - y(i, j, k);
                    }
            break;
        case Axis::Temporal:
            for (int k = 0; k < t; ++k) {
                const int kp = (k == 0) ? t - 1 : k - 1;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) out(i, j, k) = y(i, j, kp) - y(i, j, k);
            }
            break;
    }
    return out;
}

/// Real eigenvalue field of the normal operator D^T D under the 3-D DFT.
///
/// A circular difference along an axis of length L has 1-D eigenvalues
/// |1 - exp(-2*pi*I*f/L)|^2 = 2 - 2*cos(2*pi*f/L) at frequency f; the field
/// broadcasts that profile across the other two axes.
inline Tensor3 normal_spectrum(Axis axis, int rows, int cols, int frames) {
    Tensor3 out(rows, cols, frames);
    const int extent = axis == Axis::Vertical ? rows : axis == Axis::Horizontal ? cols : frames;
    std::vector<double> profile(static_cast<std::size_t>(extent));
    for (int f = 0; f < extent; ++f)
        profile[f] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * f / extent);
    for (int k = 0; k < frames; ++k)
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                const int f = axis == Axis::Vertical ? i : axis == Axis::Horizontal ? j : k;
                out(i, j, k) = profile[f];
            }
    return out;
}

} // namespace derain
