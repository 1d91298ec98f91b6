#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ctlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues of a real square matrix.
struct Spectrum {
    Eigen::VectorXcd eigenvalues;

    Eigen::Index size() const { return eigenvalues.size(); }
    double max_real() const;
    bool is_hurwitz() const { return size() == 0 || max_real() < 0.0; }
    /// Eigenvalues ordered by (real, imag) ascending; handy for comparisons.
    std::vector<std::complex<double>> sorted() const;
};

/// Throws DimensionError unless `m` is square.
void require_square(const Matrix& m, const char* what);

/// Throws ConfigError if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// e^{M t} via scaling-and-squaring with a degree-13 Padé approximant.
Matrix matexp(const Matrix& m, double t = 1.0);

/// Eigenvalues via Hessenberg reduction and shifted QR (real Schur form).
Spectrum eig(const Matrix& m);

/// True when every eigenvalue of `m` has negative real part.
bool is_hurwitz(const Matrix& m);

/// Singular values, descending.
Vector singular_values(const Matrix& m);

/// Threshold below which a singular value counts as zero:
/// sigma_max * max(rows, cols) * eps * 10.
double rank_tolerance(const Matrix& m);
Eigen::Index numerical_rank(const Matrix& m);

/// Moore–Penrose pseudoinverse.
Matrix pinv(const Matrix& m);

/// Orthonormal basis of ker(M); zero columns when M has full column rank.
Matrix null_basis(const Matrix& m);

/// sigma_max / sigma_min, +infinity for rank-deficient input.
double cond(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Permutation K with K * vec(M) = vec(M^T) for M of shape rows x cols.
Matrix commutation_matrix(Eigen::Index rows, Eigen::Index cols);

/// [B, AB, ..., A^{n-1} B]
Matrix controllability_matrix(const Matrix& a, const Matrix& b);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Smallest eigenvalue of the symmetric part of `m`.
double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace ctlqr
