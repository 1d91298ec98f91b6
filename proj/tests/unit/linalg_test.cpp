#include "ctlqr/errors.hpp"
#include "ctlqr/linalg.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace ctlqr {
namespace {

using testing::mat;

TEST(Matexp, ZeroIsIdentity) {
    EXPECT_LE((matexp(Matrix::Zero(2, 2), 5.0) - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Matexp, Scalar) {
    EXPECT_NEAR(matexp(mat({{-1.0}}), 1.0)(0, 0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(matexp(mat({{-1.0}}), 1.0)(0, 0), 0.367879, 1e-6);
}

TEST(Matexp, NilpotentSeriesTerminates) {
    for (double t : {0.0, 0.3, 2.0, 17.5}) {
        EXPECT_LE((matexp(mat({{0.0, 1.0}, {0.0, 0.0}}), t) - mat({{1.0, t}, {0.0, 1.0}})).norm(),
                  1e-13 * (1.0 + t));
    }
}

TEST(Matexp, RotationGenerator) {
    const Matrix e = matexp(mat({{0.0, 1.0}, {-1.0, 0.0}}), 0.7);
    EXPECT_LE((e - mat({{std::cos(0.7), std::sin(0.7)}, {-std::sin(0.7), std::cos(0.7)}})).norm(),
              1e-14);
}

TEST(Matexp, RejectsNonSquare) { EXPECT_THROW(matexp(Matrix::Zero(2, 3)), DimensionError); }

TEST(Matexp, SemigroupOnRandomStableMatrices) {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 7; ++n) {
        Matrix a = testing::random_matrix(n, n, rng);
        a -= (eig(a).max_real() + 0.5) * Matrix::Identity(n, n);
        const Matrix whole = matexp(a, 1.3);
        const Matrix split = matexp(a, 0.4) * matexp(a, 0.9);
        EXPECT_LE((whole - split).norm(), 1e-9 * whole.norm()) << "n = " << n;
    }
}

TEST(Eig, RotationGenerator) {
    const auto ev = eig(mat({{0.0, 1.0}, {-1.0, 0.0}})).sorted();
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_NEAR(std::abs(ev[0] - std::complex<double>(0, -1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ev[1] - std::complex<double>(0, 1)), 0.0, 1e-12);
}

TEST(Eig, Diagonal) {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << -1.0, -2.0, -3.0;
    const auto ev = eig(d).sorted();
    EXPECT_NEAR(ev[0].real(), -3.0, 1e-14);
    EXPECT_NEAR(ev[1].real(), -2.0, 1e-14);
    EXPECT_NEAR(ev[2].real(), -1.0, 1e-14);
    EXPECT_TRUE(is_hurwitz(d));
}

TEST(Eig, Nilpotent) {
    const Spectrum s = eig(mat({{0.0, 1.0}, {0.0, 0.0}}));
    EXPECT_LE(s.eigenvalues.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_FALSE(s.is_hurwitz());
}

TEST(Eig, EigenpairResidualAndConjugatePairs) {
    std::mt19937_64 rng(3);
    for (int n = 2; n <= 6; ++n) {
        const Matrix a = testing::random_matrix(n, n, rng);
        const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(a.cast<std::complex<double>>());
        const Spectrum s = eig(a);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const auto lambda = s.eigenvalues(i);
            if (std::abs(lambda.imag()) < 1e-12) continue;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < s.size(); ++j) {
                best = std::min(best, std::abs(s.eigenvalues(j) - std::conj(lambda)));
            }
            EXPECT_LE(best, 1e-9);
        }
        // Residual of the eigenpairs reconstructed from an independent complex solver.
        const Eigen::MatrixXcd v = ces.eigenvectors();
        const Eigen::MatrixXcd ac = a.cast<std::complex<double>>();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto lambda = ces.eigenvalues()(i);
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; ++j) {
                best = std::min(best, std::abs(s.eigenvalues(j) - lambda));
            }
            EXPECT_LE(best, 1e-8 * a.norm());
            EXPECT_LE((ac * v.col(i) - lambda * v.col(i)).norm(), 1e-8 * a.norm());
        }
    }
}

TEST(Pinv, Identity) {
    EXPECT_LE((pinv(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(Pinv, RowVector) {
    const Matrix m = mat({{2.0, 0.0}});
    const Matrix f = pinv(m);
    EXPECT_LE((f - mat({{0.5}, {0.0}})).norm(), 1e-15);
    EXPECT_LE((m * f * m - m).norm(), 1e-15);
    EXPECT_LE((f * m * f - f).norm(), 1e-15);
}

TEST(Pinv, PenroseConditionsOnRankDeficientInput) {
    std::mt19937_64 rng(5);
    const Matrix m = testing::random_matrix(5, 2, rng) * testing::random_matrix(2, 4, rng);
    const Matrix f = pinv(m);
    const double s = m.norm() * f.norm();
    EXPECT_LE((m * f * m - m).norm(), 1e-9 * m.norm() * s);
    EXPECT_LE((f * m * f - f).norm(), 1e-9 * f.norm() * s);
    EXPECT_LE(((m * f).transpose() - m * f).norm(), 1e-9 * s);
    EXPECT_LE(((f * m).transpose() - f * m).norm(), 1e-9 * s);
}

TEST(Pinv, RightInverseOfFullRowRank) {
    std::mt19937_64 rng(6);
    const Matrix x = testing::random_matrix(3, 8, rng);
    EXPECT_LE((x * pinv(x) - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(NullBasis, FullColumnRankIsEmpty) { EXPECT_EQ(null_basis(Matrix::Identity(3, 3)).cols(), 0); }

TEST(NullBasis, RowVector) {
    const Matrix g = null_basis(mat({{1.0, 0.0}}));
    ASSERT_EQ(g.cols(), 1);
    EXPECT_NEAR(g(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(1, 0)), 1.0, 1e-15);
}

TEST(NullBasis, RankNullityAndOrthonormality) {
    std::mt19937_64 rng(7);
    const Matrix x = testing::random_matrix(3, 7, rng);
    const Matrix g = null_basis(x);
    ASSERT_EQ(g.cols(), 4);
    EXPECT_LE((x * g).norm(), 1e-10 * x.norm());
    EXPECT_LE((g.transpose() * g - Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(NullBasis, RightInverseFamily) {
    std::mt19937_64 rng(8);
    const Matrix x = testing::random_matrix(3, 7, rng);
    const Matrix f = pinv(x);
    const Matrix g = null_basis(x);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix kbar = testing::random_matrix(g.cols(), 3, rng);
        EXPECT_LE((x * (f - g * kbar) - Matrix::Identity(3, 3)).norm(), 1e-10);
    }
}

TEST(Cond, Values) {
    EXPECT_DOUBLE_EQ(cond(Matrix::Identity(3, 3)), 1.0);
    EXPECT_NEAR(cond(mat({{10.0, 0.0}, {0.0, 1.0}})), 10.0, 1e-13);
    EXPECT_TRUE(std::isinf(cond(mat({{1.0, 2.0}, {2.0, 4.0}}))));
}

TEST(Rank, ThresholdRule) {
    EXPECT_EQ(numerical_rank(mat({{1.0, 2.0}, {2.0, 4.0}})), 1);
    EXPECT_EQ(numerical_rank(Matrix::Zero(3, 2)), 0);
    EXPECT_EQ(numerical_rank(mat({{1.0, 0.0}, {0.0, 1e-10}})), 2);
    EXPECT_EQ(numerical_rank(mat({{1.0, 0.0}, {0.0, 1e-17}})), 1);
}

TEST(Kron, VecIdentity) {
    // vec(A X B) = (B^T kron A) vec(X)
    std::mt19937_64 rng(9);
    const Matrix a = testing::random_matrix(2, 3, rng);
    const Matrix x = testing::random_matrix(3, 4, rng);
    const Matrix b = testing::random_matrix(4, 2, rng);
    EXPECT_LE((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm(), 1e-12);
    EXPECT_LE((unvec(vec(x), 3, 4) - x).norm(), 0.0);
}

TEST(Kron, CommutationMatrix) {
    std::mt19937_64 rng(10);
    const Matrix x = testing::random_matrix(3, 5, rng);
    const Matrix k = commutation_matrix(3, 5);
    EXPECT_LE((k * vec(x) - vec(x.transpose())).norm(), 0.0);
    EXPECT_LE((k.transpose() * k - Matrix::Identity(15, 15)).norm(), 0.0);
}

TEST(Controllability, Rank) {
    EXPECT_EQ(numerical_rank(controllability_matrix(testing::double_integrator().A(),
                                                    testing::double_integrator().B())),
              2);
    EXPECT_EQ(numerical_rank(controllability_matrix(Matrix::Identity(2, 2), mat({{1.0}, {1.0}}))),
              1);
}

TEST(Checks, NonFiniteRejected) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(require_finite(m, "test"), ConfigError);
    EXPECT_THROW(LtiSystem(m, mat({{1.0}, {0.0}})), ConfigError);
}

}  // namespace
}  // namespace ctlqr
