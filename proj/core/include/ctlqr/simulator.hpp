#pragma once

#include "ctlqr/linalg.hpp"
#include "ctlqr/system.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace ctlqr {

/// Piecewise-constant exploration input: u(t + iT) = mu.col(i) for 0 <= t < T.
struct PcpeInput {
    Matrix mu;  ///< m x N, one column per hold interval
    double T = 0.2;
    double dt = 1e-4;

    Eigen::Index m() const { return mu.rows(); }
    Eigen::Index N() const { return mu.cols(); }
    /// Samples per hold interval; throws ConfigError if dt does not divide T.
    Eigen::Index steps_per_interval() const;
};

/// Uniformly sampled state/input record on [0, N T].
struct Trajectory {
    std::vector<double> times;
    Matrix states;  ///< n x K
    Matrix inputs;  ///< m x K
    /// Exact per-interval state integrals (n x N) when produced by the simulator.
    std::optional<Matrix> interval_integrals;

    Eigen::Index samples() const { return states.cols(); }
};

/// Exact zero-order-hold maps over a step h:
///   x(h) = Ad x0 + Bd u0,   int_0^h x = Fd x0 + Gd u0.
struct Discretization {
    Matrix Ad;
    Matrix Bd;
    Matrix Fd;
    Matrix Gd;
};

/// All four blocks come from one exponential of [[A, B, 0], [0, 0, 0], [I, 0, 0]].
Discretization discretize_exact(const LtiSystem& sys, double h);

/// Exact sampled response to a PCPE input. Input samples at t = NT repeat the last mu.
Trajectory simulate_pcpe(const LtiSystem& sys, const PcpeInput& input, const Vector& x0);

/// False when T hits 2 pi k / |Im(l_i - l_j)| (within 1e-9) for some eigenvalue pair.
bool check_nonpathological(const Spectrum& spectrum, double T);

/// CSV with header "t,x1..xn,u1..um". Values written with 17 significant digits.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
/// The exact-integral sidecar is not part of the CSV and comes back empty.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace ctlqr
