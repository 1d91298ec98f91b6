#pragma once

#include "ctlqr/linalg.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/system.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace ctlqr {

/// One policy-iteration step: P is the value matrix of the previous gain,
/// K the improved gain it produces.
struct IterationRecord {
    int index = 0;
    Matrix K;
    Matrix P;
    double gap = 0.0;       ///< ||K_i - K_{i-1}||_F
    double residual = 0.0;  ///< Frobenius residual of the equation solved in this step
    /// -max Re eig(A - B K); only known when a model is available.
    std::optional<double> stability_margin;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
    double final_gap = 0.0;

    std::vector<Matrix> gains() const;
};

struct IterationOptions {
    double eps = 1e-10;
    int max_iters = 50;
};

/// Newton–Kleinman: solve P_i (A - B K_i) + (A - B K_i)^T P_i + Q + K_i^T R K_i = 0,
/// set K_{i+1} = R^{-1} B^T P_i, stop once ||K_{i+1} - K_i|| <= eps.
IterationTrace kleinman_iterate(const LtiSystem& sys, const Matrix& q, const Matrix& r,
                                const Matrix& k0, const IterationOptions& options = {});

/// [[A - I, B], [-R K, -R]] and [[A + I, B], [-R K, -R]].
Matrix phi_minus(const LtiSystem& sys, const Matrix& r, const Matrix& k);
Matrix phi_plus(const LtiSystem& sys, const Matrix& r, const Matrix& k);

/// Model-based step: Theta = [P_i; K_{i+1}] from
///   Phi_-^T Theta E + E^T Theta^T Phi_+ + diag(Q + K^T R K, 0) = 0,  E = [I 0].
/// Throws StabilityError when K is not stabilizing.
Matrix algorithm1_step(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& k,
                       SylvesterMethod method = SylvesterMethod::Kronecker);

/// algorithm1_step chained from K0 with the same stopping rule as kleinman_iterate.
IterationTrace algorithm1(const LtiSystem& sys, const Matrix& q, const Matrix& r,
                          const Matrix& k0, const IterationOptions& options = {},
                          SylvesterMethod method = SylvesterMethod::Kronecker);

/// "i,gap,residual,stability_margin"; the margin column is empty when unknown.
void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace);

}  // namespace ctlqr
