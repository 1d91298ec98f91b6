#pragma once

#include "ctlqr/linalg.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/system.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctlqr {

struct BenchConfig {
    std::vector<Eigen::Index> dims{2, 3, 5, 7};
    Eigen::Index m = 1;
    double q_weight = 1.0;  ///< Q = q_weight * I
    double r_weight = 2.0;  ///< R = r_weight * I
    double T = 0.2;
    double dt = 1e-4;
    int trials = 100;
    int iterations = 10;
    /// Each run is timed this many times and the fastest is kept.
    int repeats = 3;
    std::uint64_t seed = 2024;
    /// Trial-level parallelism; ignored while sequential_timing is set.
    int workers = 1;
    bool sequential_timing = true;

    /// N = (n + 1) m + n
    Eigen::Index samples_for(Eigen::Index n) const { return (n + 1) * m + n; }
    void validate() const;
};

/// Reads "key = value" lines ('#' starts a comment). Keys are the BenchConfig
/// field names; dims is a comma-separated list. Unknown keys are rejected.
BenchConfig load_bench_config(const std::filesystem::path& path);

struct BenchRow {
    Eigen::Index n = 0;
    int trial = 0;
    SylvesterMethod method = SylvesterMethod::Iterative;
    double wall_time = 0.0;    ///< seconds for the fixed-length iteration loop, best of repeats
    double k_error = 0.0;      ///< ||K_final - K*||_F
    double k_rel_error = 0.0;  ///< k_error / ||K*||_F
    double cond_zeta = 0.0;
    /// max_i ||K_i(SYL) - K_i(KRO)||_F for this trial; NaN if either run failed.
    double trace_diff = 0.0;
    bool success = false;
    std::string message;
};

struct BenchAggregate {
    Eigen::Index n = 0;
    SylvesterMethod method = SylvesterMethod::Iterative;
    double mean_time = 0.0;  ///< over successful runs
    int runs = 0;
    int successes = 0;
    int accurate = 0;  ///< runs with k_rel_error <= 1e-6
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;

    std::vector<BenchAggregate> aggregate() const;
    /// Mean KRO time over mean SYL time for dimension n.
    double time_ratio(Eigen::Index n) const;
};

/// Plant with eigenvalues whose real parts are uniform on [re_lo, re_hi]
/// (complex pairs with imaginary parts uniform on [0.1, 2]), conjugated by a
/// random orthogonal matrix, and Gaussian B. Redrawn until (A, B) is controllable.
LtiSystem random_controllable_system(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                                     double re_lo, double re_hi);

/// random_controllable_system with real parts in [-2, -0.2].
LtiSystem random_stable_system(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// Per-trial seed derived from the sweep seed, the dimension and the trial index.
std::uint64_t trial_seed(std::uint64_t seed, Eigen::Index n, int trial);

/// For every (n, trial): draw a stable plant, collect PCPE data once with
/// trapezoid quadrature, then time exactly cfg.iterations policy-iteration
/// steps from K0 = 0 with each Sylvester-transpose route. Per-trial failures
/// are recorded in the row; the sweep never aborts.
BenchReport run_benchmark(const BenchConfig& cfg);

void write_report_csv(const std::filesystem::path& path, const BenchReport& report);
/// Table of mean times per dimension and method, plus the KRO/SYL ratio.
std::string render_table(const BenchReport& report);

}  // namespace ctlqr
