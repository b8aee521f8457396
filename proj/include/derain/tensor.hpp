#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace derain {

/// Thrown when two operands do not share compatible dimensions.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an input value violates an operation's domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense 3-mode tensor of doubles holding an m x n x t video volume.
///
/// Index convention: (i, j, k) with i the row (vertical, y), j the column
/// (horizontal, x) and k the frame (temporal). The flat address of (i, j, k)
/// is ((k*m + i)*n + j), i.e. columns vary fastest, frames slowest.
class Tensor3 {
public:
    Tensor3() = default;

    Tensor3(int rows, int cols, int frames)
        : m_(rows), n_(cols), t_(frames) {
        if (rows <= 0 || cols <= 0 || frames <= 0)
            throw DimensionError("Tensor3: dimensions must be positive");
        data_.assign(static_cast<std::size_t>(rows) * cols * frames, 0.0);
    }

    static Tensor3 constant(int rows, int cols, int frames, double value) {
        Tensor3 x(rows, cols, frames);
        std::fill(x.data_.begin(), x.data_.end(), value);
        return x;
    }

    int rows() const { return m_; }
    int cols() const { return n_; }
    int frames() const { return t_; }
    std::size_t size() const { return data_.size(); }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * m_ + i) * n_ + j;
    }

    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool same_dims(const Tensor3& other) const {
        return m_ == other.m_ && n_ == other.n_ && t_ == other.t_;
    }

    friend bool operator==(const Tensor3& a, const Tensor3& b) {
        return a.same_dims(b) && a.data_ == b.data_;
    }

    Tensor3& operator+=(const Tensor3& other) {
        require_same_dims(other, "operator+=");
        for (std::size_t p = 0; p < data_.size(); ++p) data_[p] += other.data_[p];
        return *this;
    }

    Tensor3& operator-=(const Tensor3& other) {
        require_same_dims(other, "operator-=");
        for (std::size_t p = 0; p < data_.size(); ++p) data_[p] -= other.data_[p];
        return *this;
    }

    Tensor3& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
    friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_same_dims(const Tensor3& other, const char* what) const {
        if (!same_dims(other))
            throw DimensionError(std::string(what) + ": dimension mismatch");
    }

private:
    int m_ = 0, n_ = 0, t_ = 0;
    std::vector<double> data_;
};

/// sum over all voxels of x*y
inline double inner_product(const Tensor3& x, const Tensor3& y) {
    x.require_same_dims(y, "inner_product");
    double acc = 0.0;
    const double* a = x.data();
    const double* b = y.data();
    for (std::size_t p = 0; p < x.size(); ++p) acc += a[p] * b[p];
    return acc;
}

/// sqrt of the sum of squares; zero iff x is all-zero
inline double frobenius_norm(const Tensor3& x) {
    double acc = 0.0;
    const double* a = x.data();
    for (std::size_t p = 0; p < x.size(); ++p) acc += a[p] * a[p];
    return std::sqrt(acc);
}

/// Projects x onto the box [0, upper], elementwise. Idempotent.
inline Tensor3 clamp_box(const Tensor3& x, const Tensor3& upper) {
    x.require_same_dims(upper, "clamp_box");
    Tensor3 out = x;
    double* o = out.data();
    const double* u = upper.data();
    for (std::size_t p = 0; p < out.size(); ++p)
        o[p] = std::min(std::max(o[p], 0.0), u[p]);
    return out;
}

/// A single 2-D field (one frontal slice of a tensor).
struct Frame {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Frame() = default;
    Frame(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
};

inline Frame extract_frame(const Tensor3& x, int k) {
    Frame f(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) f.at(i, j) = x(i, j, k);
    return f;
}

inline void set_frame(Tensor3& x, int k, const Frame& f) {
    if (f.rows != x.rows() || f.cols != x.cols())
        throw DimensionError("set_frame: frame dimensions do not match tensor");
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j, k) = f.at(i, j);
}

/// Three aligned R/G/B planes with values clamped to [0,1] on construction.
class ColorVideo {
public:
    ColorVideo(Tensor3 r, Tensor3 g, Tensor3 b)
        : r_(std::move(r)), g_(std::move(g)), b_(std::move(b)) {
        if (!r_.same_dims(g_) || !r_.same_dims(b_))
            throw DimensionError("ColorVideo: channel planes must share dimensions");
        clamp01(r_);
        clamp01(g_);
        clamp01(b_);
    }

    int rows() const { return r_.rows(); }
    int cols() const { return r_.cols(); }
    int frames() const { return r_.frames(); }

    const Tensor3& red() const { return r_; }
    const Tensor3& green() const { return g_; }
    const Tensor3& blue() const { return b_; }

private:
    static void clamp01(Tensor3& x) {
        double* p = x.data();
        for (std::size_t q = 0; q < x.size(); ++q)
            p[q] = std::min(std::max(p[q], 0.0), 1.0);
    }

    Tensor3 r_, g_, b_;
};

} // namespace derain
