#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "derain/diffops.hpp"
#include "derain/fft.hpp"
#include "derain/shrinkage.hpp"
#include "derain/tensor.hpp"

namespace derain {

/// Weights and controls for the split augmented Lagrangian iteration.
///
/// alpha[0] weighs the vertical gradient of the rain layer, alpha[1] the
/// sparsity of the rain layer, alpha[2] the horizontal gradient of the
/// background and alpha[3] its temporal gradient.
struct SolverParams {
    std::array<double, 4> alpha{0.01, 1e-5, 1e-5, 0.01};
    double mu = 1.0;
    double tol = 1e-4;
    int max_iter = 100;
    ShrinkMode mode = ShrinkMode::Signed;

    void validate() const {
        for (double a : alpha)
            if (!(a >= 0.0)) throw DomainError("SolverParams: alpha must be nonnegative");
        if (!(mu > 0.0)) throw DomainError("SolverParams: mu must be positive");
        if (!(tol > 0.0)) throw DomainError("SolverParams: tol must be positive");
        if (max_iter < 1) throw DomainError("SolverParams: max_iter must be at least 1");
    }
};

/// One row of the convergence history.
struct IterationRecord {
    double rel_change = 0.0;
    // ||grad_v R - V1||F, ||R - V2||F, ||grad_h B - V3||F, ||grad_t B - V4||F
    std::array<double, 4> residual{0.0, 0.0, 0.0, 0.0};
};

/// All twelve iteration tensors plus counters and the residual history.
struct DerainState {
    Tensor3 O, B, R;
    std::array<Tensor3, 4> V;
    std::array<Tensor3, 4> D;
    int iter = 0;
    std::vector<IterationRecord> history;
};

struct DerainResult {
    Tensor3 B, R;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history;
};

/// B starts at the observation, everything else at zero.
inline DerainState init_state(const Tensor3& O) {
    if (!O.all_finite()) throw DomainError("init_state: observation has non-finite entries");
    const double* p = O.data();
    for (std::size_t q = 0; q < O.size(); ++q)
        if (p[q] < 0.0) throw DomainError("init_state: observation has negative entries");
    DerainState s;
    s.O = O;
    s.B = O;
    s.R = Tensor3(O.rows(), O.cols(), O.frames());
    for (int i = 0; i < 4; ++i) {
        s.V[i] = Tensor3(O.rows(), O.cols(), O.frames());
        s.D[i] = Tensor3(O.rows(), O.cols(), O.frames());
    }
    return s;
}

/// Shrinkage updates of the four auxiliaries:
///   V1 = S_{a1/mu}(grad_v R + D1),  V2 = S_{a2/mu}(R + D2),
///   V3 = S_{a3/mu}(grad_h B + D3),  V4 = S_{a4/mu}(grad_t B + D4).
///
/// The D sign here is the one consistent with the multiplier ascent
/// D += constraint gap and the (V - D) numerators of the quadratic solves;
/// mixing the opposite sign into any one of the three updates makes the
/// iteration diverge.
inline void update_auxiliaries(DerainState& s, const SolverParams& p) {
    s.V[0] = soft_threshold(apply_diff(s.R, Axis::Vertical) + s.D[0], p.alpha[0] / p.mu, p.mode);
    s.V[1] = soft_threshold(s.R + s.D[1], p.alpha[1] / p.mu, p.mode);
    s.V[2] = soft_threshold(apply_diff(s.B, Axis::Horizontal) + s.D[2], p.alpha[2] / p.mu, p.mode);
    s.V[3] = soft_threshold(apply_diff(s.B, Axis::Temporal) + s.D[3], p.alpha[3] / p.mu, p.mode);
}

/// DFT-domain eigenvalues of 1 + mu*(grad_h^T grad_h + grad_t^T grad_t);
/// a loop invariant worth computing once per solve.
inline Tensor3 background_denominator(int rows, int cols, int frames, double mu) {
    Tensor3 denom = normal_spectrum(Axis::Horizontal, rows, cols, frames);
    denom += normal_spectrum(Axis::Temporal, rows, cols, frames);
    denom *= mu;
    double* d = denom.data();
    for (std::size_t q = 0; q < denom.size(); ++q) d[q] += 1.0;
    return denom;
}

/// DFT-domain eigenvalues of (1 + mu) + mu*grad_v^T grad_v.
inline Tensor3 rain_denominator(int rows, int cols, int frames, double mu) {
    Tensor3 denom = normal_spectrum(Axis::Vertical, rows, cols, frames);
    denom *= mu;
    double* d = denom.data();
    for (std::size_t q = 0; q < denom.size(); ++q) d[q] += 1.0 + mu;
    return denom;
}

inline Tensor3 background_rhs(const DerainState& s, const SolverParams& p) {
    Tensor3 rhs = s.O - s.R;
    if (p.mu != 0.0) {
        rhs += p.mu * apply_diff_adjoint(s.V[2] - s.D[2], Axis::Horizontal);
        rhs += p.mu * apply_diff_adjoint(s.V[3] - s.D[3], Axis::Temporal);
    }
    return rhs;
}

inline Tensor3 rain_rhs(const DerainState& s, const SolverParams& p) {
    Tensor3 rhs = s.O - s.B;
    if (p.mu != 0.0) {
        rhs += p.mu * apply_diff_adjoint(s.V[0] - s.D[0], Axis::Vertical);
        rhs += p.mu * (s.V[1] - s.D[1]);
    }
    return rhs;
}

/// Unclamped background subproblem: the numerator
///   (O - R) + mu*grad_h^T(V3 - D3) + mu*grad_t^T(V4 - D4)
/// divided in the DFT domain by 1 + mu*(spec_horizontal + spec_temporal).
inline Tensor3 solve_background(const DerainState& s, const SolverParams& p, Dft3& dft) {
    return dft.solve_diagonal(
        background_rhs(s, p),
        background_denominator(s.O.rows(), s.O.cols(), s.O.frames(), p.mu));
}

/// Unclamped rain subproblem: the numerator
///   (O - B) + mu*grad_v^T(V1 - D1) + mu*(V2 - D2)
/// divided in the DFT domain by 1 + mu + mu*spec_vertical.
inline Tensor3 solve_rain(const DerainState& s, const SolverParams& p, Dft3& dft) {
    return dft.solve_diagonal(rain_rhs(s, p),
                              rain_denominator(s.O.rows(), s.O.cols(), s.O.frames(), p.mu));
}

inline void update_background(DerainState& s, const SolverParams& p, Dft3& dft) {
    s.B = clamp_box(solve_background(s, p, dft), s.O);
}

inline void update_rain(DerainState& s, const SolverParams& p, Dft3& dft) {
    s.R = clamp_box(solve_rain(s, p, dft), s.O);
}

/// Scaled multiplier ascent; returns the Frobenius norms of the four
/// constraint residuals, which are exactly the increments added to D.
inline std::array<double, 4> update_multipliers(DerainState& s) {
    std::array<Tensor3, 4> gaps = {
        apply_diff(s.R, Axis::Vertical) - s.V[0],
        s.R - s.V[1],
        apply_diff(s.B, Axis::Horizontal) - s.V[2],
        apply_diff(s.B, Axis::Temporal) - s.V[3],
    };
    std::array<double, 4> norms{};
    for (int i = 0; i < 4; ++i) {
        norms[i] = frobenius_norm(gaps[i]);
        s.D[i] += gaps[i];
    }
    return norms;
}

/// Current constraint gaps without touching the multipliers.
inline std::array<double, 4> constraint_residuals(const DerainState& s) {
    return {
        frobenius_norm(apply_diff(s.R, Axis::Vertical) - s.V[0]),
        frobenius_norm(s.R - s.V[1]),
        frobenius_norm(apply_diff(s.B, Axis::Horizontal) - s.V[2]),
        frobenius_norm(apply_diff(s.B, Axis::Temporal) - s.V[3]),
    };
}

/// Owns one solve: state, parameters and the DFT workspace reused across
/// iterations. Update order within a sweep is Gauss-Seidel: the background
/// uses the current rain estimate and the rain update sees the new background.
class DerainSolver {
public:
    DerainSolver(const Tensor3& O, SolverParams params)
        : params_(std::move(params)),
          state_(init_state(O)),
          dft_(O.rows(), O.cols(), O.frames()),
          bg_denom_(background_denominator(O.rows(), O.cols(), O.frames(), params_.mu)),
          rain_denom_(rain_denominator(O.rows(), O.cols(), O.frames(), params_.mu)) {
        params_.validate();
    }

    /// One full sweep: auxiliaries, background, rain, multipliers.
    const IterationRecord& step() {
        const Tensor3 prev_B = state_.B;
        update_auxiliaries(state_, params_);
        state_.B = clamp_box(dft_.solve_diagonal(background_rhs(state_, params_), bg_denom_),
                             state_.O);
        state_.R = clamp_box(dft_.solve_diagonal(rain_rhs(state_, params_), rain_denom_),
                             state_.O);
        IterationRecord rec;
        rec.residual = update_multipliers(state_);
        rec.rel_change =
            frobenius_norm(state_.B - prev_B) / std::max(frobenius_norm(prev_B), kNormFloor);
        state_.iter += 1;
        state_.history.push_back(rec);
        converged_ = rec.rel_change < params_.tol;
        return state_.history.back();
    }

    bool converged() const { return converged_; }
    const DerainState& state() const { return state_; }

    DerainResult run() {
        while (state_.iter < params_.max_iter) {
            step();
            if (converged_) break;
        }
        return result();
    }

    DerainResult result() const {
        return {state_.B, state_.R, state_.iter, converged_, state_.history};
    }

private:
    static constexpr double kNormFloor = 1e-12;

    SolverParams params_;
    DerainState state_;
    Dft3 dft_;
    Tensor3 bg_denom_, rain_denom_;
    bool converged_ = false;
};

/// Runs the full iteration until the relative change of B drops below tol
/// or max_iter sweeps elapse. Deterministic for fixed inputs.
inline DerainResult remove_rain(const Tensor3& O, const SolverParams& params = {}) {
    DerainSolver solver(O, params);
    return solver.run();
}

} // namespace derain
