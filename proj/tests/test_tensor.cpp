#include <cmath>

#include <gtest/gtest.h>

#include "derain/rng.hpp"
#include "derain/tensor.hpp"

using namespace derain;

namespace {

Tensor3 random_tensor(int m, int n, int t, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Tensor3 x(m, n, t);
    Rng rng(seed);
    for (std::size_t p = 0; p < x.size(); ++p) x.data()[p] = rng.uniform(lo, hi);
    return x;
}

// naive second-route accumulation used as the oracle
double naive_inner(const Tensor3& a, const Tensor3& b) {
    double acc = 0.0;
    for (int k = 0; k < a.frames(); ++k)
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) acc += a(i, j, k) * b(i, j, k);
    return acc;
}

} // namespace

TEST(Tensor, LayoutMatchesDocumentedOffset) {
    Tensor3 x(3, 4, 2);
    x(1, 2, 1) = 7.0;
    // ((k*m + i)*n + j) = ((1*3 + 1)*4 + 2) = 18
    EXPECT_EQ(x.data()[18], 7.0);
    EXPECT_EQ(x.size(), 24u);
}

TEST(Tensor, EqualityIsDimsAndData) {
    Tensor3 a = random_tensor(2, 3, 2, 11);
    Tensor3 b = a;
    EXPECT_TRUE(a == b);
    b(0, 0, 0) += 1e-15;
    EXPECT_FALSE(a == b);
}

TEST(Tensor, FrobeniusZeroTensor) {
    EXPECT_EQ(frobenius_norm(Tensor3(2, 2, 2)), 0.0);
}

TEST(Tensor, FrobeniusAllOnes) {
    EXPECT_NEAR(frobenius_norm(Tensor3::constant(2, 2, 2, 1.0)), std::sqrt(8.0), 1e-15);
}

TEST(Tensor, FrobeniusMatchesNaiveInnerProduct) {
    Tensor3 x = random_tensor(3, 3, 3, 42);
    EXPECT_NEAR(frobenius_norm(x), std::sqrt(naive_inner(x, x)), 1e-12);
}

TEST(Tensor, InnerProductAgainstZeros) {
    Tensor3 x = random_tensor(3, 2, 4, 7);
    EXPECT_EQ(inner_product(x, Tensor3(3, 2, 4)), 0.0);
}

TEST(Tensor, InnerProductOnes) {
    Tensor3 ones = Tensor3::constant(2, 1, 1, 1.0);
    EXPECT_EQ(inner_product(ones, ones), 2.0);
}

TEST(Tensor, InnerProductMatchesNaiveLoopAndIsSymmetric) {
    Tensor3 x = random_tensor(4, 3, 2, 1);
    Tensor3 y = random_tensor(4, 3, 2, 2);
    EXPECT_NEAR(inner_product(x, y), naive_inner(x, y), 1e-12);
    EXPECT_EQ(inner_product(x, y), inner_product(y, x));
}

TEST(Tensor, InnerProductRejectsDimensionMismatch) {
    EXPECT_THROW(inner_product(Tensor3(2, 2, 2), Tensor3(2, 2, 3)), DimensionError);
}

TEST(Tensor, NormSquaredEqualsSelfInnerProduct) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Tensor3 x = random_tensor(5, 4, 3, seed, -2.0, 2.0);
        const double n2 = frobenius_norm(x) * frobenius_norm(x);
        const double ip = inner_product(x, x);
        EXPECT_NEAR(n2, ip, 1e-10 * (1.0 + std::abs(ip)));
    }
}

TEST(Tensor, ClampBoxIdentityInsideBox) {
    Tensor3 x = random_tensor(3, 3, 2, 5, 0.1, 0.4);
    Tensor3 upper = Tensor3::constant(3, 3, 2, 0.5);
    EXPECT_TRUE(clamp_box(x, upper) == x);
}

TEST(Tensor, ClampBoxFloorsNegatives) {
    Tensor3 x = Tensor3::constant(2, 2, 2, -1.0);
    Tensor3 upper = Tensor3::constant(2, 2, 2, 0.7);
    EXPECT_TRUE(clamp_box(x, upper) == Tensor3(2, 2, 2));
}

TEST(Tensor, ClampBoxCapsAtUpper) {
    Tensor3 upper = Tensor3::constant(2, 2, 2, 0.5);
    Tensor3 x = upper * 2.0;
    EXPECT_TRUE(clamp_box(x, upper) == upper);
}

TEST(Tensor, ClampBoxIsIdempotent) {
    Tensor3 x = random_tensor(4, 4, 3, 13, -2.0, 2.0);
    Tensor3 upper = random_tensor(4, 4, 3, 14, 0.0, 1.0);
    Tensor3 once = clamp_box(x, upper);
    EXPECT_TRUE(clamp_box(once, upper) == once);
}

TEST(Tensor, ClampBoxRejectsDimensionMismatch) {
    EXPECT_THROW(clamp_box(Tensor3(2, 2, 2), Tensor3(3, 2, 2)), DimensionError);
}

TEST(Tensor, ElementwiseOpsCommuteWithIndexing) {
    Tensor3 a = random_tensor(3, 4, 2, 21);
    Tensor3 b = random_tensor(3, 4, 2, 22);
    Tensor3 sum = a + b;
    Tensor3 diff = a - b;
    Tensor3 scaled = a * 2.5;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                EXPECT_EQ(sum(i, j, k), a(i, j, k) + b(i, j, k));
                EXPECT_EQ(diff(i, j, k), a(i, j, k) - b(i, j, k));
                EXPECT_EQ(scaled(i, j, k), a(i, j, k) * 2.5);
            }
}

TEST(Tensor, RejectsNonPositiveDimensions) {
    EXPECT_THROW(Tensor3(0, 2, 2), DimensionError);
    EXPECT_THROW(Tensor3(2, -1, 2), DimensionError);
}

TEST(ColorVideo, ClampsChannelsToUnitInterval) {
    Tensor3 r = Tensor3::constant(2, 2, 2, 1.5);
    Tensor3 g = Tensor3::constant(2, 2, 2, -0.5);
    Tensor3 b = Tensor3::constant(2, 2, 2, 0.25);
    ColorVideo v(r, g, b);
    EXPECT_EQ(v.red()(0, 0, 0), 1.0);
    EXPECT_EQ(v.green()(0, 0, 0), 0.0);
    EXPECT_EQ(v.blue()(0, 0, 0), 0.25);
}

TEST(ColorVideo, RejectsMismatchedPlanes) {
    EXPECT_THROW(ColorVideo(Tensor3(2, 2, 2), Tensor3(2, 2, 2), Tensor3(2, 2, 3)), DimensionError);
}

TEST(Frame, ExtractAndSetRoundTrip) {
    Tensor3 x = random_tensor(3, 4, 2, 31);
    Frame f = extract_frame(x, 1);
    Tensor3 y(3, 4, 2);
    set_frame(y, 1, f);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(y(i, j, 1), x(i, j, 1));
}
