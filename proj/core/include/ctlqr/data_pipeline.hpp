#pragma once

#include "ctlqr/linalg.hpp"
#include "ctlqr/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ctlqr {

/// Integrated data over N hold intervals of length T:
///   Xtilde(:, j) = x((j+1)T) - x(jT)
///   X(:, j)      = int_0^T x(tau + jT) dtau
///   U(:, j)      = int_0^T u(tau + jT) dtau
/// For exact data, Xtilde = A X + B U.
struct DataMatrices {
    Matrix Xtilde;
    Matrix X;
    Matrix U;
    double T = 0.0;
    double dt = 0.0;
    std::optional<std::uint64_t> seed;
    std::string quadrature;  ///< "exact" or "trapezoid"

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index m() const { return U.rows(); }
    Eigen::Index N() const { return X.cols(); }
    /// [X; U]
    Matrix Z() const;
};

enum class Quadrature {
    Auto,       ///< exact sidecar when the trajectory carries one, trapezoid otherwise
    Exact,
    Trapezoid,
};

DataMatrices build_data_matrices(const Trajectory& traj, double T,
                                 Quadrature mode = Quadrature::Auto);

/// rank([X; U]) == n + m.
bool verify_rank(const DataMatrices& d);

/// n + m columns of [X; U] forming a nonsingular Z_eta.
struct ColumnSelection {
    std::vector<Eigen::Index> eta;  ///< ascending column indices
    Matrix Zeta;
    Matrix Xeta;
    Matrix Ueta;
    Matrix Xtilde_eta;
    double condition = 0.0;  ///< cond(Z_eta)
};

/// Greedy pivoted orthogonal elimination: each step takes the column with the
/// largest component outside the span of those already taken (lowest index on
/// ties). Throws DataError if the data turn out rank deficient.
ColumnSelection select_columns(const DataMatrices& d);

/// Selection that keeps every column; the learner's fallback path.
ColumnSelection all_columns(const DataMatrices& d);

/// Bundle directory: Xtilde.txt, X.txt, U.txt (matrix text format) and meta.json.
void save_bundle(const std::filesystem::path& dir, const DataMatrices& d);
DataMatrices load_bundle(const std::filesystem::path& dir);

}  // namespace ctlqr
