#pragma once

#include "derain/geometry.hpp"
#include "derain/solver.hpp"
#include "derain/tensor.hpp"

namespace derain {

/// Whether to estimate the streak angle or trust a caller-supplied one.
struct AngleChoice {
    bool auto_detect = true;
    double fixed_angle = 0.0;
    int detect_stride = 1; // temporal subsampling for the sweep
};

struct PipelineResult {
    DerainResult solve;
    double theta = 0.0;
    ShiftPlan plan;
};

/// Full single-channel pipeline: estimate the streak angle (or use the fixed
/// one), normalize geometry so streaks are near vertical, run the solver,
/// and map background and rain back to the original geometry.
inline PipelineResult derain_normalized(const Tensor3& y, const SolverParams& params,
                                        const AngleChoice& angle = {}) {
    PipelineResult out;
    out.theta = angle.auto_detect
                    ? detect_angle(y, -89, 89, angle.detect_stride).theta_hat
                    : angle.fixed_angle;
    out.plan = plan_normalization(out.theta);
    if (out.plan.identity()) {
        out.solve = remove_rain(y, params);
        return out;
    }
    const Tensor3 normalized = apply_plan(y, out.plan);
    DerainResult res = remove_rain(normalized, params);
    res.B = invert_plan(res.B, out.plan);
    res.R = invert_plan(res.R, out.plan);
    out.solve = std::move(res);
    return out;
}

} // namespace derain
