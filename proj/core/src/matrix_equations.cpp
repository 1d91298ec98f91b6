#include "ctlqr/matrix_equations.hpp"

#include "ctlqr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace ctlqr {

namespace {

void check_problem(const SylvesterTransposeProblem& prob, const Matrix& x) {
    const auto p = prob.left.rows();
    const auto q = prob.left.cols();
    if (prob.right.rows() != p || prob.right.cols() != q) {
        throw DimensionError("Sylvester-transpose: left and right multipliers differ in shape");
    }
    if (x.cols() != q) {
        throw DimensionError("Sylvester-transpose: right multiplier X has " +
                             std::to_string(x.cols()) + " columns, expected " + std::to_string(q));
    }
    if (prob.constant.rows() != q || prob.constant.cols() != q) {
        throw DimensionError("Sylvester-transpose: constant term must be " + std::to_string(q) +
                             "x" + std::to_string(q));
    }
}

// Matrix-form operator and its adjoint. Theta is p x n, images are q x q.
struct StOperator {
    const Matrix& left;
    const Matrix& right;
    const Matrix& x;

    void apply(const Matrix& theta, Matrix& out) const {
        Matrix tx = theta * x;  // p x q
        out.noalias() = left.transpose() * tx;
        out.noalias() += tx.transpose() * right;
    }

    // <apply(Theta), Y> = <Theta, adjoint(Y)>
    void adjoint(const Matrix& y, Matrix& out) const {
        Matrix yx = y * x.transpose();  // q x n
        out.noalias() = left * yx;
        out.noalias() += right * (y.transpose() * x.transpose());
    }
};

}  // namespace

Matrix solve_lyapunov(const Matrix& acl, const Matrix& w) {
    require_square(acl, "solve_lyapunov");
    if (w.rows() != acl.rows() || w.cols() != acl.cols()) {
        throw DimensionError("solve_lyapunov: W must match Acl in shape");
    }
    const Spectrum s = eig(acl);
    if (!s.is_hurwitz()) {
        throw StabilityError("solve_lyapunov: closed-loop matrix is not Hurwitz (max Re = " +
                             std::to_string(s.max_real()) + ")");
    }
    const auto n = acl.rows();
    if (w.isZero(0.0)) {
        return Matrix::Zero(n, n);
    }
    const Matrix eye = Matrix::Identity(n, n);
    // vec(P Acl) = (Acl^T (x) I) vec P,  vec(Acl^T P) = (I (x) Acl^T) vec P
    const Matrix op = kron(acl.transpose(), eye) + kron(eye, acl.transpose());
    const Vector p = op.partialPivLu().solve(-vec(w));
    return symmetrize(unvec(p, n, n));
}

Matrix sylvester_transpose_residual(const SylvesterTransposeProblem& prob, const Matrix& x,
                                    const Matrix& theta) {
    check_problem(prob, x);
    Matrix out;
    StOperator{prob.left, prob.right, x}.apply(theta, out);
    return out + prob.constant;
}

Matrix sylvester_transpose_operator(const SylvesterTransposeProblem& prob, const Matrix& x) {
    check_problem(prob, x);
    const auto p = prob.left.rows();
    const auto n = x.rows();
    // vec(L^T Theta X) = (X^T (x) L^T) vec Theta
    // vec(X^T Theta^T R) = (R^T (x) X^T) vec Theta^T = (R^T (x) X^T) K vec Theta
    return kron(x.transpose(), prob.left.transpose()) +
           kron(prob.right.transpose(), x.transpose()) * commutation_matrix(p, n);
}

double sylvester_transpose_backward_error(const SylvesterTransposeProblem& prob, const Matrix& x,
                                          const Matrix& theta) {
    const double res = sylvester_transpose_residual(prob, x, theta).norm();
    const double scale = (prob.left.norm() + prob.right.norm()) * x.norm() * theta.norm() +
                         prob.constant.norm();
    return scale > 0.0 ? res / scale : res;
}

SylvesterTransposeProblem congruence_transform(const SylvesterTransposeProblem& prob,
                                               const Matrix& w) {
    const auto q = prob.left.cols();
    if (w.rows() != q || w.cols() != q) {
        throw DimensionError("congruence_transform: W must be q x q");
    }
    return SylvesterTransposeProblem{prob.left * w, prob.right * w,
                                     w.transpose() * prob.constant * w};
}

SylvesterSolution solve_sylvester_transpose(const SylvesterTransposeProblem& prob,
                                            const Matrix& x, const SylvesterOptions& options) {
    check_problem(prob, x);
    if (!(options.tol > 0.0)) {
        throw ConfigError("solve_sylvester_transpose: tol must be positive");
    }
    if (options.max_iters < 1) {
        throw ConfigError("solve_sylvester_transpose: max_iters must be positive");
    }
    const auto p = prob.left.rows();
    const auto n = x.rows();
    const auto q = prob.left.cols();

    SylvesterSolution sol;
    sol.theta = options.initial_guess.value_or(Matrix::Zero(p, n));
    if (sol.theta.rows() != p || sol.theta.cols() != n) {
        throw DimensionError("solve_sylvester_transpose: initial guess has the wrong shape");
    }

    const StOperator op{prob.left, prob.right, x};
    const double operator_scale = (prob.left.norm() + prob.right.norm()) * x.norm();
    const double c_norm = prob.constant.norm();
    auto converged = [&](double res_norm) {
        return res_norm <= options.tol * (operator_scale * sol.theta.norm() + c_norm);
    };

    // Jacobi scaling: iterate on Y with Theta = D .* Y, where D holds the inverse
    // column norms of the vectorized operator. The image of the unit matrix
    // E_ij is l_i x_j^T + x_j r_i^T (rows of left, X and right), so the norms
    // come in closed form.
    const Vector ll = prob.left.rowwise().squaredNorm();
    const Vector rr = prob.right.rowwise().squaredNorm();
    const Vector xx = x.rowwise().squaredNorm();
    const Matrix lx = prob.left * x.transpose();   // p x n, l_i . x_j
    const Matrix rx = prob.right * x.transpose();  // p x n, r_i . x_j
    Matrix scale(p, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            const double sq = xx(j) * (ll(i) + rr(i)) + 2.0 * lx(i, j) * rx(i, j);
            scale(i, j) = sq > 0.0 ? 1.0 / std::sqrt(sq) : 1.0;
        }
    }

    Matrix r(q, q);
    Matrix s(p, n);
    Matrix dir(p, n);
    Matrix image(q, q);
    auto true_residual = [&] {
        op.apply(sol.theta, image);
        r = -prob.constant - image;
    };
    auto scaled_gradient = [&] {
        op.adjoint(r, s);
        s.array() *= scale.array();
    };
    true_residual();
    if (converged(r.norm())) {
        sol.residual = r.norm();
        sol.backward_error = sylvester_transpose_backward_error(prob, x, sol.theta);
        return sol;
    }
    scaled_gradient();
    dir = s;
    double gamma = s.squaredNorm();
    // Periodic residual replacement keeps recursion drift in check without
    // discarding the search direction.
    const int refresh_every = std::max<int>(20, static_cast<int>(2 * p * n));
    Matrix step(p, n);

    for (int it = 1; it <= options.max_iters; ++it) {
        sol.iterations = it;
        if (gamma == 0.0) {
            break;
        }
        step = dir.cwiseProduct(scale);
        op.apply(step, image);
        const double denom = image.squaredNorm();
        if (denom == 0.0) {
            break;
        }
        const double alpha = gamma / denom;
        sol.theta.noalias() += alpha * step;
        r.noalias() -= alpha * image;

        if (it % refresh_every == 0) {
            true_residual();
            if (converged(r.norm())) break;
        } else if (converged(r.norm())) {
            // Confirm against the true residual before accepting.
            true_residual();
            if (converged(r.norm())) break;
        }
        scaled_gradient();
        const double gamma_next = s.squaredNorm();
        dir = s + (gamma_next / gamma) * dir;
        gamma = gamma_next;
    }

    sol.residual = sylvester_transpose_residual(prob, x, sol.theta).norm();
    sol.backward_error = sylvester_transpose_backward_error(prob, x, sol.theta);
    if (converged(sol.residual)) {
        return sol;
    }
    std::ostringstream msg;
    msg << "solve_sylvester_transpose: backward error " << sol.backward_error << " above tol "
        << options.tol << " after " << sol.iterations << " iterations";
    throw ConvergenceError(msg.str(), sol.residual);
}

SylvesterSolution solve_sylvester_transpose_kron(const SylvesterTransposeProblem& prob,
                                                 const Matrix& x) {
    const Matrix op = sylvester_transpose_operator(prob, x);
    const auto p = prob.left.rows();
    const auto n = x.rows();

    Eigen::ColPivHouseholderQR<Matrix> qr(op);
    qr.setThreshold(static_cast<double>(std::max(op.rows(), op.cols())) *
                    std::numeric_limits<double>::epsilon() * 10.0);
    if (qr.rank() < op.cols()) {
        throw SingularityError("solve_sylvester_transpose_kron: vectorized operator has rank " +
                               std::to_string(qr.rank()) + " < " + std::to_string(op.cols()));
    }
    SylvesterSolution sol;
    sol.theta = unvec(qr.solve(Vector(-vec(prob.constant))), p, n);
    sol.residual = sylvester_transpose_residual(prob, x, sol.theta).norm();
    sol.backward_error = sylvester_transpose_backward_error(prob, x, sol.theta);
    sol.iterations = 1;
    return sol;
}

double are_residual(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& p) {
    const Matrix& a = sys.A();
    const Matrix& b = sys.B();
    const Matrix gain = r.ldlt().solve(b.transpose() * p);
    return (q + p * a + a.transpose() * p - p * b * gain).norm();
}

AreSolution solve_are(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& k0) {
    const auto n = sys.n();
    const auto m = sys.m();
    if (q.rows() != n || q.cols() != n || r.rows() != m || r.cols() != m) {
        throw DimensionError("solve_are: weight shapes do not match the system");
    }
    if (k0.rows() != m || k0.cols() != n) {
        throw DimensionError("solve_are: K0 must be m x n");
    }
    if (!is_hurwitz(sys.closed_loop(k0))) {
        throw StabilityError("solve_are: initial gain is not stabilizing");
    }
    const auto r_ldlt = r.ldlt();

    AreSolution out;
    Matrix k = k0;
    double last_gap = std::numeric_limits<double>::infinity();
    constexpr int kMaxIters = 100;
    for (int it = 1; it <= kMaxIters; ++it) {
        out.iterations = it;
        out.P = solve_lyapunov(sys.closed_loop(k), q + k.transpose() * r * k);
        const Matrix next = r_ldlt.solve(sys.B().transpose() * out.P);
        const double gap = (next - k).norm();
        k = next;
        if (gap <= 1e-12 * std::max(1.0, k.norm())) {
            break;
        }
        // Past the quadratic phase the gap sits at the rounding floor.
        if (gap < 1e-8 && gap >= last_gap) {
            break;
        }
        last_gap = gap;
    }
    out.K = k;

    const Matrix brb = sys.B() * r_ldlt.solve(sys.B().transpose());
    const double scale = q.norm() + 2.0 * out.P.norm() * sys.A().norm() +
                         out.P.squaredNorm() * brb.norm();
    const double res = are_residual(sys, q, r, out.P);
    if (res > 1e-9 * std::max(scale, 1e-300) && res > 1e-14) {
        throw ConvergenceError("solve_are: Riccati residual " + std::to_string(res) +
                                   " exceeds tolerance",
                               res);
    }
    return out;
}

}  // namespace ctlqr

namespace ctlqr {

const char* to_string(SylvesterMethod method) {
    switch (method) {
        case SylvesterMethod::Iterative:
            return "SYL";
        case SylvesterMethod::Kronecker:
            return "KRO";
    }
    return "?";
}

}  // namespace ctlqr
