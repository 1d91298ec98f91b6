#include "ctlqr/errors.hpp"
#include "ctlqr/simulator.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace ctlqr {
namespace {

using testing::mat;

TEST(Discretize, PureIntegrator) {
    const Discretization d = discretize_exact(LtiSystem(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), 1.0);
    EXPECT_LE((d.Ad - Matrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LE((d.Bd - Matrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LE((d.Fd - Matrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LE((d.Gd - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Discretize, ScalarClosedForms) {
    const double T = 0.2;
    const Discretization d = discretize_exact(testing::scalar_plant(), T);
    const double decay = std::exp(-T);
    EXPECT_NEAR(d.Ad(0, 0), decay, 1e-15);
    EXPECT_NEAR(d.Bd(0, 0), 1.0 - decay, 1e-15);
    EXPECT_NEAR(d.Fd(0, 0), 1.0 - decay, 1e-15);
    EXPECT_NEAR(d.Gd(0, 0), T - (1.0 - decay), 1e-15);
}

TEST(Discretize, VanishingStep) {
    const Discretization d = discretize_exact(testing::double_integrator(), 1e-12);
    EXPECT_LE(d.Fd.norm(), 1e-11);
    EXPECT_LE(d.Gd.norm(), 1e-11);
}

TEST(Discretize, SemigroupOfExactStepping) {
    std::mt19937_64 rng(71);
    const LtiSystem sys(testing::random_matrix(3, 3, rng), testing::random_matrix(3, 2, rng));
    const Discretization whole = discretize_exact(sys, 0.4);
    const Discretization half = discretize_exact(sys, 0.2);
    const Vector x0 = testing::random_matrix(3, 1, rng);
    const Vector u = testing::random_matrix(2, 1, rng);
    const Vector mid = half.Ad * x0 + half.Bd * u;
    EXPECT_LE((whole.Ad * x0 + whole.Bd * u - (half.Ad * mid + half.Bd * u)).norm(), 1e-10);
    const Vector integral = half.Fd * x0 + half.Gd * u + half.Fd * mid + half.Gd * u;
    EXPECT_LE((whole.Fd * x0 + whole.Gd * u - integral).norm(), 1e-10);
}

TEST(Simulate, ZeroInputZeroState) {
    const PcpeInput input{Matrix::Zero(1, 4), 0.2, 0.01};
    const Trajectory traj = simulate_pcpe(testing::scalar_plant(), input, Vector::Zero(1));
    EXPECT_EQ(traj.samples(), 4 * 20 + 1);
    EXPECT_EQ(traj.times.size(), 81u);
    EXPECT_LE(traj.states.norm(), 0.0);
}

TEST(Simulate, ScalarStepResponse) {
    const double T = 0.2;
    const PcpeInput input{mat({{1.0}}), T, 1e-3};
    const Trajectory traj = simulate_pcpe(testing::scalar_plant(), input, Vector::Zero(1));
    EXPECT_NEAR(traj.states(0, traj.samples() - 1), 1.0 - std::exp(-T), 1e-14);
    EXPECT_NEAR(traj.times.back(), T, 1e-15);
    // Every sample is exact, not just the interval endpoint.
    for (Eigen::Index k = 0; k < traj.samples(); ++k) {
        EXPECT_NEAR(traj.states(0, k), 1.0 - std::exp(-traj.times[static_cast<std::size_t>(k)]),
                    1e-14);
    }
}

TEST(Simulate, Superposition) {
    std::mt19937_64 rng(72);
    const LtiSystem sys(testing::random_matrix(3, 3, rng), testing::random_matrix(3, 1, rng));
    const Matrix mu = testing::random_matrix(1, 6, rng);
    const Trajectory one = simulate_pcpe(sys, PcpeInput{mu, 0.1, 0.01}, Vector::Zero(3));
    const Trajectory two = simulate_pcpe(sys, PcpeInput{2.0 * mu, 0.1, 0.01}, Vector::Zero(3));
    EXPECT_LE((two.states - 2.0 * one.states).norm(), 1e-13 * two.states.norm());
}

TEST(Simulate, LinearInInitialStateAndInput) {
    std::mt19937_64 rng(73);
    const LtiSystem sys(testing::random_matrix(2, 2, rng), testing::random_matrix(2, 1, rng));
    const Matrix mu = testing::random_matrix(1, 3, rng);
    const Vector x0 = testing::random_matrix(2, 1, rng);
    const Trajectory a = simulate_pcpe(sys, PcpeInput{mu, 0.1, 0.02}, Vector::Zero(2));
    const Trajectory b = simulate_pcpe(sys, PcpeInput{Matrix::Zero(1, 3), 0.1, 0.02}, x0);
    const Trajectory ab = simulate_pcpe(sys, PcpeInput{mu, 0.1, 0.02}, x0);
    EXPECT_LE((ab.states - a.states - b.states).norm(), 1e-13 * ab.states.norm());
}

TEST(Simulate, FiniteDifferencesApproachTheOde) {
    const LtiSystem sys = testing::double_integrator();
    double previous = 0.0;
    for (double dt : {1e-2, 1e-3}) {
        const PcpeInput input{mat({{1.0, -0.5}}), 0.1, dt};
        const Trajectory traj = simulate_pcpe(sys, input, Vector::Ones(2));
        double worst = 0.0;
        for (Eigen::Index k = 0; k + 1 < traj.samples(); ++k) {
            const Vector slope = (traj.states.col(k + 1) - traj.states.col(k)) / dt;
            const Vector rhs = sys.A() * traj.states.col(k) + sys.B() * traj.inputs.col(k);
            worst = std::max(worst, (slope - rhs).norm());
        }
        if (previous > 0.0) {
            EXPECT_LT(worst, 0.2 * previous);  // first order: 10x finer dt, ~10x smaller defect
        }
        previous = worst;
    }
}

TEST(Simulate, RejectsIndivisibleStep) {
    const PcpeInput input{mat({{1.0}}), 0.2, 0.03};
    EXPECT_THROW(simulate_pcpe(testing::scalar_plant(), input, Vector::Zero(1)), ConfigError);
}

TEST(Simulate, RejectsShapeMismatch) {
    const PcpeInput input{Matrix::Ones(2, 3), 0.2, 0.1};
    EXPECT_THROW(simulate_pcpe(testing::scalar_plant(), input, Vector::Zero(1)), DimensionError);
}

TEST(Pathological, RotationAtPi) {
    const Spectrum s = eig(mat({{0.0, 1.0}, {-1.0, 0.0}}));
    EXPECT_FALSE(check_nonpathological(s, std::numbers::pi));
    EXPECT_FALSE(check_nonpathological(s, 2.0 * std::numbers::pi));
    EXPECT_TRUE(check_nonpathological(s, 0.2));
}

TEST(Pathological, RealSpectrumAlwaysFine) {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << -1.0, 2.0, -3.0;
    for (double T : {0.1, 1.0, std::numbers::pi, 10.0}) {
        EXPECT_TRUE(check_nonpathological(eig(d), T));
    }
}

TEST(TrajectoryCsv, RoundTrip) {
    std::mt19937_64 rng(74);
    const LtiSystem sys(testing::random_matrix(2, 2, rng), testing::random_matrix(2, 1, rng));
    const Trajectory traj = simulate_pcpe(sys, PcpeInput{testing::random_matrix(1, 3, rng), 0.1, 0.05},
                                          testing::random_matrix(2, 1, rng));
    const auto dir = testing::scratch_dir("traj");
    write_trajectory_csv(dir / "traj.csv", traj);
    const Trajectory back = read_trajectory_csv(dir / "traj.csv");
    EXPECT_EQ(back.states, traj.states);
    EXPECT_EQ(back.inputs, traj.inputs);
    EXPECT_EQ(back.times, traj.times);
    EXPECT_FALSE(back.interval_integrals.has_value());
}

TEST(SystemFile, RoundTrip) {
    const auto dir = testing::scratch_dir("system");
    const LtiSystem sys = testing::double_integrator();
    save_system(dir / "sys.txt", sys);
    const LtiSystem back = load_system(dir / "sys.txt");
    EXPECT_EQ(back.A(), sys.A());
    EXPECT_EQ(back.B(), sys.B());
    EXPECT_TRUE(back.is_controllable());
    EXPECT_FALSE(LtiSystem(Matrix::Identity(2, 2), mat({{1.0}, {1.0}})).is_controllable());
}

}  // namespace
}  // namespace ctlqr
