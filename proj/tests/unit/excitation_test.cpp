#include "ctlqr/errors.hpp"
#include "ctlqr/excitation.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace ctlqr {
namespace {

using testing::mat;

TEST(Hankel, ScalarArrangement) {
    const Matrix h = hankel(mat({{1.0, 0.0, 0.0, 1.0, 0.0}}), 2);
    EXPECT_EQ(h, mat({{1.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 0.0}}));
}

TEST(Hankel, DepthOneIsTheSequence) {
    const Matrix mu = mat({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    EXPECT_EQ(hankel(mu, 1), mu);
}

TEST(Hankel, StackedPairs) {
    const Matrix mu = mat({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    EXPECT_EQ(hankel(mu, 2), mat({{1.0, 2.0}, {4.0, 5.0}, {2.0, 3.0}, {5.0, 6.0}}));
}

TEST(Hankel, TooShort) { EXPECT_THROW(hankel(mat({{1.0, 2.0}}), 3), DimensionError); }

TEST(IsPe, Examples) {
    EXPECT_TRUE(is_pe(mat({{1.0, 0.0, 0.0, 1.0, 0.0}}), 2));
    for (Eigen::Index depth = 1; depth <= 3; ++depth) {
        EXPECT_FALSE(is_pe(Matrix::Zero(1, 8), depth));
    }
}

TEST(IsPe, BelowMinimumLength) {
    for (Eigen::Index m = 1; m <= 3; ++m) {
        for (Eigen::Index depth = 1; depth <= 4; ++depth) {
            const Eigen::Index length = min_pe_length(m, depth) - 1;
            if (length < depth) continue;
            const PeSequence pe = gen_pe_sequence(m, depth, min_pe_length(m, depth), 5);
            EXPECT_FALSE(is_pe(pe.mu.leftCols(length), depth));
        }
    }
}

TEST(Generate, Certified) {
    const PeSequence a = gen_pe_sequence(1, 3, 5, 1);
    EXPECT_EQ(a.mu.rows(), 1);
    EXPECT_EQ(a.mu.cols(), 5);
    EXPECT_EQ(a.order, 3);
    EXPECT_TRUE(is_pe(a.mu, 3));

    const PeSequence b = gen_pe_sequence(2, 4, 11, 2);
    EXPECT_TRUE(is_pe(b.mu, 4));
    EXPECT_NEAR(b.mu.cwiseAbs().maxCoeff(), 1.0, 1e-15);
}

TEST(Generate, Deterministic) {
    EXPECT_EQ(gen_pe_sequence(2, 3, 9, 42).mu, gen_pe_sequence(2, 3, 9, 42).mu);
    EXPECT_NE(gen_pe_sequence(2, 3, 9, 42).mu, gen_pe_sequence(2, 3, 9, 43).mu);
}

TEST(Generate, RejectsShortLength) {
    EXPECT_THROW(gen_pe_sequence(1, 3, 4, 1), ConfigError);
}

TEST(Properties, ScaleInvariantAndMonotone) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PeSequence pe = gen_pe_sequence(2, 4, 11, seed);
        EXPECT_TRUE(is_pe(-3.5 * pe.mu, 4));
        EXPECT_TRUE(is_pe(1e-6 * pe.mu, 4));
        for (Eigen::Index depth = 1; depth < 4; ++depth) {
            EXPECT_TRUE(is_pe(pe.mu, depth));
        }
    }
}

TEST(SequenceFile, RoundTrip) {
    const auto dir = testing::scratch_dir("sequence");
    const Matrix mu = gen_pe_sequence(2, 3, 8, 9).mu;
    save_sequence(dir / "mu.txt", mu);
    EXPECT_EQ(load_sequence(dir / "mu.txt"), mu);
}

}  // namespace
}  // namespace ctlqr
