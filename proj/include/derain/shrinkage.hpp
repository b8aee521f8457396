#pragma once

#include <cmath>

#include "derain/tensor.hpp"

namespace derain {

/// Variants of the l1 proximal map used for the auxiliary updates.
///
/// Signed is the standard soft-thresholding operator sign(a)*max(|a|-v, 0),
/// the correct prox for signed gradient fields. OneSided zeroes every entry
/// not exceeding the threshold (a - v where a > v, 0 otherwise), which forces
/// nonnegative outputs; it is kept for fidelity experiments.
enum class ShrinkMode { Signed, OneSided };

inline double soft_threshold_scalar(double a, double v, ShrinkMode mode) {
    if (mode == ShrinkMode::Signed) {
        const double mag = std::abs(a) - v;
        return mag > 0.0 ? std::copysign(mag, a) : 0.0;
    }
    return a > v ? a - v : 0.0;
}

/// Elementwise l1 prox with threshold v >= 0.
inline Tensor3 soft_threshold(const Tensor3& a, double v, ShrinkMode mode = ShrinkMode::Signed) {
    if (v < 0.0) throw DomainError("soft_threshold: threshold must be nonnegative");
    Tensor3 out = a;
    double* p = out.data();
    for (std::size_t q = 0; q < out.size(); ++q) p[q] = soft_threshold_scalar(p[q], v, mode);
    return out;
}

} // namespace derain
