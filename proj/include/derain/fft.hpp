#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "derain/tensor.hpp"

namespace derain {

namespace detail {
// FFTW plan creation/destruction is not thread-safe; execution is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Reusable 3-D complex DFT workspace for one set of tensor dimensions.
///
/// Plans are created once per instance with FFTW_ESTIMATE so repeated solves
/// at the same dimensions are cheap and bitwise deterministic.
class Dft3 {
public:
    Dft3(int rows, int cols, int frames) : m_(rows), n_(cols), t_(frames) {
        if (rows <= 0 || cols <= 0 || frames <= 0)
            throw DimensionError("Dft3: dimensions must be positive");
        const std::size_t count = static_cast<std::size_t>(rows) * cols * frames;
        buf_ = fftw_alloc_complex(count);
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        // storage order ((k*m + i)*n + j) means the FFTW dims are (t, m, n)
        fwd_ = fftw_plan_dft_3d(t_, m_, n_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_3d(t_, m_, n_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    Dft3(const Dft3&) = delete;
    Dft3& operator=(const Dft3&) = delete;

    ~Dft3() {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(buf_);
    }

    int rows() const { return m_; }
    int cols() const { return n_; }
    int frames() const { return t_; }

    /// Unnormalized forward 3-D DFT of a real tensor.
    std::vector<std::complex<double>> forward(const Tensor3& x) {
        require_dims(x);
        load(x);
        fftw_execute(fwd_);
        std::vector<std::complex<double>> out(count());
        for (std::size_t p = 0; p < count(); ++p) out[p] = {buf_[p][0], buf_[p][1]};
        return out;
    }

    /// Solves the circulant system diag-by-diag: returns the real part of
    /// IDFT( DFT(rhs) / denom ), where denom is a real positive field whose
    /// entries are the DFT-domain eigenvalues of the system operator.
    Tensor3 solve_diagonal(const Tensor3& rhs, const Tensor3& denom) {
        require_dims(rhs);
        require_dims(denom);
        load(rhs);
        fftw_execute(fwd_);
        const double* d = denom.data();
        for (std::size_t p = 0; p < count(); ++p) {
            buf_[p][0] /= d[p];
            buf_[p][1] /= d[p];
        }
        fftw_execute(inv_);
        Tensor3 out(m_, n_, t_);
        const double scale = 1.0 / static_cast<double>(count());
        double* o = out.data();
        for (std::size_t p = 0; p < count(); ++p) o[p] = buf_[p][0] * scale;
        return out;
    }

private:
    std::size_t count() const { return static_cast<std::size_t>(m_) * n_ * t_; }

    void require_dims(const Tensor3& x) const {
        if (x.rows() != m_ || x.cols() != n_ || x.frames() != t_)
            throw DimensionError("Dft3: tensor dimensions do not match workspace");
    }

    void load(const Tensor3& x) {
        const double* src = x.data();
        for (std::size_t p = 0; p < count(); ++p) {
            buf_[p][0] = src[p];
            buf_[p][1] = 0.0;
        }
    }

    int m_, n_, t_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

} // namespace derain
