#pragma once

#include "ctlqr/linalg.hpp"
#include "ctlqr/system.hpp"

#include <optional>

namespace ctlqr {

/// P * Acl + Acl^T * P + W = 0 for Hurwitz Acl.
///
/// Solved by Kronecker vectorization and a dense LU solve; intended for the
/// small orders used throughout this project. Throws StabilityError when Acl
/// is not Hurwitz.
Matrix solve_lyapunov(const Matrix& acl, const Matrix& w);

/// Generalized Sylvester-transpose equation
///
///     left^T * Theta * X + X^T * Theta^T * right + constant = 0
///
/// for Theta (p x n) given left, right (p x q), X (n x q) and constant (q x q).
/// The right multiplier X is passed to the solvers separately.
struct SylvesterTransposeProblem {
    Matrix left;
    Matrix right;
    Matrix constant;
};

struct SylvesterOptions {
    /// Stop once the normwise backward error
    ///   ||res||_F / (||left|| ||Theta|| ||X|| + ||X|| ||Theta|| ||right|| + ||constant||)
    /// (Frobenius norms) is at most tol.
    double tol = 1e-10;
    int max_iters = 10000;
    /// Starting point; zero when absent.
    std::optional<Matrix> initial_guess;
};

struct SylvesterSolution {
    Matrix theta;
    double residual = 0.0;        ///< ||res||_F
    double backward_error = 0.0;  ///< residual over the normwise scale above
    int iterations = 0;
};

/// Evaluates left^T Theta X + X^T Theta^T right + constant.
Matrix sylvester_transpose_residual(const SylvesterTransposeProblem& prob, const Matrix& x,
                                    const Matrix& theta);

/// ||res||_F / (||left|| ||Theta|| ||X|| + ||X|| ||Theta|| ||right|| + ||constant||).
double sylvester_transpose_backward_error(const SylvesterTransposeProblem& prob, const Matrix& x,
                                          const Matrix& theta);

/// The same equation after the congruence W^T (.) W with nonsingular q x q W:
/// (left W, right W, W^T constant W), right multiplier X W. Solutions coincide.
SylvesterTransposeProblem congruence_transform(const SylvesterTransposeProblem& prob,
                                               const Matrix& w);

/// Coefficient matrix M with vec(left^T Theta X + X^T Theta^T right) = M vec(Theta).
/// Uses the commutation matrix for the transposed term.
Matrix sylvester_transpose_operator(const SylvesterTransposeProblem& prob, const Matrix& x);

/// Conjugate-gradient iteration on the normal equations, carried out directly
/// in matrix form. Each step costs a handful of products of (n+m)-sized
/// matrices; the Kronecker operator is never formed. The unknown is scaled
/// by the operator's column norms (Jacobi). Throws ConvergenceError
/// when the residual has not reached the tolerance after max_iters steps.
SylvesterSolution solve_sylvester_transpose(const SylvesterTransposeProblem& prob,
                                            const Matrix& x,
                                            const SylvesterOptions& options = {});

/// Direct solve through the vectorized operator (Householder QR of the
/// q^2 x pn coefficient matrix). Throws SingularityError if that matrix is
/// rank deficient.
SylvesterSolution solve_sylvester_transpose_kron(const SylvesterTransposeProblem& prob,
                                                 const Matrix& x);

struct AreSolution {
    Matrix P;
    Matrix K;
    int iterations = 0;
};

/// Q + P A + A^T P - P B R^{-1} B^T P = 0 by Newton–Kleinman iteration from a
/// stabilizing K0, iterated until successive gains differ by at most 1e-12.
AreSolution solve_are(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& k0);

/// Frobenius norm of Q + P A + A^T P - P B R^{-1} B^T P.
double are_residual(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& p);

}  // namespace ctlqr

namespace ctlqr {

/// Which Sylvester-transpose route a policy-iteration step uses.
enum class SylvesterMethod {
    Iterative,  ///< solve_sylvester_transpose ("SYL")
    Kronecker,  ///< solve_sylvester_transpose_kron ("KRO")
};

const char* to_string(SylvesterMethod method);

}  // namespace ctlqr
