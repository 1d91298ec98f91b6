#include "ctlqr/bench.hpp"
#include "ctlqr/errors.hpp"
#include "ctlqr/init_gain.hpp"
#include "ctlqr/kleinman.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <string>

namespace ctlqr {
namespace {

using testing::mat;

// Hand iteration of the scalar formulas p = w / (2 (1 + k)), k' = p with w = 1 + k^2.
constexpr double kScalarK1 = 0.5;
constexpr double kScalarK2 = 5.0 / 12.0;
constexpr double kScalarK3 = 1014.0 / 2448.0;

TEST(Kleinman, ScalarTrace) {
    const IterationTrace trace =
        kleinman_iterate(testing::scalar_plant(), mat({{1.0}}), mat({{1.0}}), mat({{0.0}}));
    ASSERT_GE(trace.records.size(), 4u);
    EXPECT_NEAR(trace.records[0].K(0, 0), kScalarK1, 1e-15);
    EXPECT_NEAR(trace.records[0].P(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(trace.records[1].K(0, 0), kScalarK2, 1e-15);
    EXPECT_NEAR(trace.records[1].K(0, 0), 0.41667, 1e-5);
    EXPECT_NEAR(trace.records[2].K(0, 0), kScalarK3, 1e-15);
    EXPECT_NEAR(trace.records[2].K(0, 0), 0.414216, 1e-6);
    EXPECT_TRUE(trace.converged);
    EXPECT_NEAR(trace.records.back().K(0, 0), std::sqrt(2.0) - 1.0, 1e-14);
}

TEST(Kleinman, FixedPoint) {
    const LtiSystem sys = testing::double_integrator();
    const IterationTrace trace = kleinman_iterate(sys, Matrix::Identity(2, 2), mat({{1.0}}),
                                                  testing::double_integrator_k());
    EXPECT_EQ(trace.records.size(), 1u);
    EXPECT_LE(trace.final_gap, 1e-12);
    EXPECT_TRUE(trace.converged);
}

TEST(Kleinman, DoubleIntegrator) {
    const IterationTrace trace = kleinman_iterate(testing::double_integrator(),
                                                  Matrix::Identity(2, 2), mat({{1.0}}),
                                                  mat({{1.0, 1.0}}));
    EXPECT_TRUE(trace.converged);
    EXPECT_LE(trace.records.size(), 6u);
    EXPECT_LE((trace.records.back().K - testing::double_integrator_k()).norm(), 1e-10);
    EXPECT_LE((trace.records.back().P - testing::double_integrator_p()).norm(), 1e-10);
}

TEST(Kleinman, RejectsNonStabilizingStart) {
    EXPECT_THROW(kleinman_iterate(testing::double_integrator(), Matrix::Identity(2, 2),
                                  mat({{1.0}}), Matrix::Zero(1, 2)),
                 StabilityError);
    EXPECT_THROW(algorithm1_step(testing::double_integrator(), Matrix::Identity(2, 2),
                                 mat({{1.0}}), Matrix::Zero(1, 2)),
                 StabilityError);
}

TEST(Kleinman, MonotoneStabilizingTrace) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 4);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 2);
        const LtiSystem sys = random_controllable_system(n, m, seed, -2.0, -0.2);
        const Matrix q = Matrix::Identity(n, n);
        const Matrix r = Matrix::Identity(m, m);
        const IterationTrace trace = kleinman_iterate(sys, q, r, Matrix::Zero(m, n));
        const AreSolution star = solve_are(sys, q, r, Matrix::Zero(m, n));
        for (std::size_t i = 0; i < trace.records.size(); ++i) {
            const auto& rec = trace.records[i];
            ASSERT_TRUE(rec.stability_margin.has_value());
            EXPECT_GT(*rec.stability_margin, 0.0);
            EXPECT_GE(min_symmetric_eigenvalue(rec.P - star.P), -1e-8);
            if (i > 0) {
                EXPECT_GE(min_symmetric_eigenvalue(trace.records[i - 1].P - rec.P), -1e-8);
            }
        }
    }
}

TEST(Algorithm1, ScalarStep) {
    const Matrix theta =
        algorithm1_step(testing::scalar_plant(), mat({{1.0}}), mat({{1.0}}), mat({{0.0}}));
    EXPECT_LE((theta - mat({{0.5}, {0.5}})).norm(), 1e-14);
}

TEST(Algorithm1, DoubleIntegratorFixedPoint) {
    Matrix expected(3, 2);
    expected << testing::double_integrator_p(), testing::double_integrator_k();
    for (auto method : {SylvesterMethod::Kronecker, SylvesterMethod::Iterative}) {
        const Matrix theta = algorithm1_step(testing::double_integrator(), Matrix::Identity(2, 2),
                                             mat({{1.0}}), testing::double_integrator_k(), method);
        EXPECT_LE((theta - expected).norm(), 1e-9) << to_string(method);
    }
}

TEST(Algorithm1, MatchesKleinmanStepOnRandomPairs) {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Eigen::Index m = 1 + (trial / 5) % 2;
        const LtiSystem sys = random_controllable_system(n, m, 1000 + trial, -1.0, 1.0);
        const Matrix q = Matrix::Identity(n, n);
        const Matrix r = Matrix::Identity(m, m);
        // A random stabilizing gain: the LQR gain for random diagonal weights.
        std::vector<std::complex<double>> poles;
        for (Eigen::Index i = 0; i < n; ++i) poles.emplace_back(-1.0 - 0.5 * i, 0.0);
        const Matrix placed = assign_eigenvalues(sys.A(), sys.B(), poles);
        const Vector w = testing::random_matrix(n, 1, rng).col(0).cwiseAbs().array() + 0.1;
        const Matrix k = solve_are(sys, Matrix(w.asDiagonal()), r, placed).K;
        const Matrix theta = algorithm1_step(sys, q, r, k);
        const Matrix top = theta.topRows(n);
        EXPECT_LE((top - top.transpose()).norm(), 1e-10 * std::max(1.0, top.norm()));
        const Matrix p = solve_lyapunov(sys.closed_loop(k), q + k.transpose() * r * k);
        const Matrix k_next = r.ldlt().solve(sys.B().transpose() * p);
        EXPECT_LE((top - p).norm(), 1e-8 * std::max(1.0, p.norm())) << "trial " << trial;
        EXPECT_LE((theta.bottomRows(m) - k_next).norm(), 1e-8 * std::max(1.0, k_next.norm()));
    }
}

TEST(Algorithm1, ChainMatchesKleinman) {
    const LtiSystem sys = random_controllable_system(4, 2, 5, -2.0, -0.2);
    const Matrix q = Matrix::Identity(4, 4);
    const Matrix r = Matrix::Identity(2, 2);
    const IterationTrace a = kleinman_iterate(sys, q, r, Matrix::Zero(2, 4));
    const IterationTrace b = algorithm1(sys, q, r, Matrix::Zero(2, 4));
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_LE((a.records[i].K - b.records[i].K).norm(), 1e-9);
    }
}

TEST(Kleinman, QuadraticRate) {
    const LtiSystem sys = random_controllable_system(3, 1, 9, -1.0, -0.2);
    const Matrix q = Matrix::Identity(3, 3);
    const Matrix r = Matrix::Identity(1, 1);
    const AreSolution star = solve_are(sys, q, r, Matrix::Zero(1, 3));
    const IterationTrace trace = kleinman_iterate(sys, q, r, Matrix::Zero(1, 3));
    std::vector<double> err;
    for (const auto& rec : trace.records) {
        const double e = (rec.K - star.K).norm();
        if (e < 1e-11) break;
        err.push_back(e);
    }
    ASSERT_GE(err.size(), 4u);
    std::vector<double> ratio;
    for (std::size_t i = err.size() - 3; i + 1 < err.size(); ++i) {
        ratio.push_back(err[i + 1] / (err[i] * err[i]));
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    EXPECT_LE(*hi / *lo, 10.0);
}

TEST(TraceCsv, Header) {
    const IterationTrace trace =
        kleinman_iterate(testing::scalar_plant(), mat({{1.0}}), mat({{1.0}}), mat({{0.0}}));
    const auto dir = testing::scratch_dir("trace");
    write_trace_csv(dir / "trace.csv", trace);
    std::ifstream in(dir / "trace.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "i,gap,residual,stability_margin");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, static_cast<int>(trace.records.size()));
}

}  // namespace
}  // namespace ctlqr
