#pragma once

#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/excitation.hpp"
#include "ctlqr/linalg.hpp"
#include "ctlqr/simulator.hpp"
#include "ctlqr/system.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace ctlqr::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

// x' = -x + u
inline LtiSystem scalar_plant(double a = -1.0) { return LtiSystem(mat({{a}}), mat({{1.0}})); }

inline LtiSystem double_integrator() {
    return LtiSystem(mat({{0.0, 1.0}, {0.0, 0.0}}), mat({{0.0}, {1.0}}));
}

// Analytic LQR solution of the double integrator with Q = I, R = 1.
inline Matrix double_integrator_p() {
    const double s = std::sqrt(3.0);
    return mat({{s, 1.0}, {1.0, s}});
}
inline Matrix double_integrator_k() { return mat({{1.0, std::sqrt(3.0)}}); }

// PCPE data of order n+1 with N = (n+1)m + n (or `length`) and exact interval integrals.
// One simulator step per interval keeps these fixtures cheap.
inline DataMatrices exact_data(const LtiSystem& sys, std::uint64_t seed, double T = 0.5,
                               Eigen::Index length = 0) {
    const auto n = sys.n();
    const auto m = sys.m();
    const Eigen::Index N = length > 0 ? length : (n + 1) * m + n;
    const PeSequence pe = gen_pe_sequence(m, n + 1, N, seed);
    const Trajectory traj = simulate_pcpe(sys, PcpeInput{pe.mu, T, T}, Vector::Zero(n));
    return build_data_matrices(traj, T, Quadrature::Exact);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    return Matrix::NullaryExpr(rows, cols, [&] { return gauss(rng); });
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ctlqr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace ctlqr::testing
