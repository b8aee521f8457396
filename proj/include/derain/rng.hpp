#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace derain {

/// Small deterministic PRNG (splitmix64 core) with uniform and gaussian
/// draws. Used instead of <random> distributions so that fixed seeds give
/// bitwise-identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// uniform in (0, 1]
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int bound) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(bound)); }

    /// standard normal via Box-Muller (pairs cached)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Derives an independent stream for a substream index (e.g. one frame).
    Rng fork(std::uint64_t stream) const {
        Rng child(state_ ^ (0xD6E8FEB86659FD93ull * (stream + 1)));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace derain
