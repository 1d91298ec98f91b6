#include "ctlqr/linalg.hpp"

#include "ctlqr/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ctlqr {

double Spectrum::max_real() const {
    if (eigenvalues.size() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    return eigenvalues.real().maxCoeff();
}

std::vector<std::complex<double>> Spectrum::sorted() const {
    std::vector<std::complex<double>> out(eigenvalues.data(),
                                          eigenvalues.data() + eigenvalues.size());
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ConfigError(std::string(what) + ": matrix has non-finite entries");
    }
}

Matrix matexp(const Matrix& m, double t) {
    require_square(m, "matexp");
    if (!std::isfinite(t)) {
        throw ConfigError("matexp: non-finite time argument");
    }
    if (m.size() == 0) {
        return m;
    }
    const Matrix scaled = m * t;
    return scaled.exp();
}

Spectrum eig(const Matrix& m) {
    require_square(m, "eig");
    Spectrum s;
    if (m.size() == 0) {
        return s;
    }
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig: QR iteration did not converge for a " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             " matrix (norm " + std::to_string(m.norm()) + ")");
    }
    s.eigenvalues = solver.eigenvalues();
    return s;
}

bool is_hurwitz(const Matrix& m) { return eig(m).is_hurwitz(); }

Vector singular_values(const Matrix& m) {
    if (m.size() == 0) {
        return Vector();
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

namespace {

double tolerance_from(const Vector& sv, Eigen::Index rows, Eigen::Index cols) {
    if (sv.size() == 0) {
        return 0.0;
    }
    return sv(0) * static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * 10.0;
}

Eigen::Index count_above(const Vector& sv, double tol) {
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++r;
    }
    return r;
}

}  // namespace

double rank_tolerance(const Matrix& m) {
    return tolerance_from(singular_values(m), m.rows(), m.cols());
}

Eigen::Index numerical_rank(const Matrix& m) {
    const Vector sv = singular_values(m);
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    return count_above(sv, tolerance_from(sv, m.rows(), m.cols()));
}

Matrix pinv(const Matrix& m) {
    if (m.size() == 0) {
        return Matrix::Zero(m.cols(), m.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double tol = tolerance_from(sv, m.rows(), m.cols());
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) inv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix null_basis(const Matrix& m) {
    const Eigen::Index cols = m.cols();
    if (m.rows() == 0) {
        return Matrix::Identity(cols, cols);
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const Eigen::Index rank =
        sv.size() == 0 || sv(0) == 0.0 ? 0 : count_above(sv, tolerance_from(sv, m.rows(), cols));
    return svd.matrixV().rightCols(cols - rank);
}

double cond(const Matrix& m) {
    const Vector sv = singular_values(m);
    if (sv.size() == 0) {
        return 1.0;
    }
    const double smallest = sv(sv.size() - 1);
    // Non-square input counts as rank deficient when it lacks min(rows, cols) rank.
    if (sv(0) == 0.0 || smallest <= tolerance_from(sv, m.rows(), m.cols())) {
        return std::numeric_limits<double>::infinity();
    }
    return sv(0) / smallest;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw DimensionError("unvec: length " + std::to_string(v.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix commutation_matrix(Eigen::Index rows, Eigen::Index cols) {
    // vec(M)[i + j*rows] = M(i,j) = vec(M^T)[j + i*cols]
    Matrix k = Matrix::Zero(rows * cols, rows * cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            k(j + i * cols, i + j * rows) = 1.0;
        }
    }
    return k;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
    require_square(a, "controllability_matrix");
    if (b.rows() != a.rows()) {
        throw DimensionError("controllability_matrix: B row count differs from A");
    }
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    Matrix c(n, n * m);
    Matrix block = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        c.middleCols(k * m, m) = block;
        block = a * block;
    }
    return c;
}

double min_symmetric_eigenvalue(const Matrix& m) {
    require_square(m, "min_symmetric_eigenvalue");
    if (m.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("min_symmetric_eigenvalue: eigen-solver failed");
    }
    return solver.eigenvalues()(0);
}

}  // namespace ctlqr
