#pragma once

#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/kleinman.hpp"
#include "ctlqr/linalg.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/system.hpp"

#include <optional>

namespace ctlqr {

/// Data-only coefficients of one policy-evaluation/improvement step:
///   Y-^T Theta X_eta + X_eta^T Theta^T Y+ + Q_i = 0.
struct IterationMatrices {
    Matrix Yminus;  ///< [Xtilde_eta - X_eta; -R K X_eta - R U_eta]
    Matrix Yplus;   ///< [Xtilde_eta + X_eta; -R K X_eta - R U_eta]
    Matrix Qi;      ///< X_eta^T (Q + K^T R K) X_eta
};

IterationMatrices build_iteration_matrices(const ColumnSelection& sel, const Matrix& k,
                                           const Matrix& q, const Matrix& r);

/// Right-multiplies every data block by W = Z_eta^{-1}, so Z_eta becomes the
/// identity. The iteration equation built from the image has the same solution.
/// Applying W to the blocks (rather than to the assembled constant) keeps the
/// rounding at cond(Z_eta) eps instead of cond(Z_eta)^2 eps.
ColumnSelection congruence_image(const ColumnSelection& sel);

/// Splits Theta = [P; K] (P n x n). P comes back symmetrized; an asymmetry
/// above 1e-7 * ||P|| throws ConsistencyError.
struct PolicyBlocks {
    Matrix P;
    Matrix K;
};
PolicyBlocks extract_policy(const Matrix& theta, Eigen::Index n);

struct LearnerOptions {
    double eps = 1e-10;
    int max_iters = 50;
    /// When false, run exactly max_iters iterations regardless of eps.
    bool stop_on_convergence = true;
    SylvesterMethod method = SylvesterMethod::Iterative;
    /// Tighter than the solver default: each step's forward error is the backward
    /// error times the operator condition, and the gains are compared at 1e-8.
    SylvesterOptions sylvester{.tol = 1e-14, .max_iters = 10000, .initial_guess = std::nullopt};
    /// Start each iterative solve from the previous Theta.
    bool warm_start = true;
    /// Solve the equation after the congruence Z_eta^{-T} (.) Z_eta^{-1}. Same
    /// solution; conditioning no longer scales with cond(Z_eta)^2.
    bool precondition = true;
    /// Retry a failed step once with every data column.
    bool full_data_fallback = true;
    /// Ground-truth plant used only to fill IterationRecord::stability_margin.
    std::optional<LtiSystem> audit;
};

struct LearnedPolicy {
    Matrix K;
    Matrix P;
    IterationTrace trace;
    ColumnSelection selection;
};

/// Off-policy data-based policy iteration.
///
/// Each step solves the Sylvester-transpose equation built from the data for
/// Theta = [P_i; K_{i+1}], then takes K_{i+1} from its bottom block, until
/// ||K_{i+1} - K_i|| <= eps. The value matrix doubles as a data-side
/// stability certificate: an indefinite P_i means K_i was not stabilizing.
///
/// Errors: DataError when rank([X; U]) < n + m; ConvergenceError (carrying
/// cond(Z_eta)) when the equation cannot be solved; StabilityError for a
/// non-stabilizing gain.
LearnedPolicy algorithm2(const DataMatrices& d, const Matrix& q, const Matrix& r,
                         const Matrix& k0, const LearnerOptions& options = {});

/// Same, with a precomputed column selection.
LearnedPolicy algorithm2(const DataMatrices& d, const ColumnSelection& sel, const Matrix& q,
                         const Matrix& r, const Matrix& k0, const LearnerOptions& options = {});

}  // namespace ctlqr
