#include "ctlqr/kleinman.hpp"

#include "ctlqr/errors.hpp"

#include <fstream>
#include <iomanip>
#include <string>

namespace ctlqr {

std::vector<Matrix> IterationTrace::gains() const {
    std::vector<Matrix> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(rec.K);
    return out;
}

namespace {

void check_weights(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& k) {
    if (q.rows() != sys.n() || q.cols() != sys.n()) {
        throw DimensionError("Q must be n x n");
    }
    if (r.rows() != sys.m() || r.cols() != sys.m()) {
        throw DimensionError("R must be m x m");
    }
    if (k.rows() != sys.m() || k.cols() != sys.n()) {
        throw DimensionError("gain must be m x n");
    }
}

Matrix phi(const LtiSystem& sys, const Matrix& r, const Matrix& k, double shift) {
    const auto n = sys.n();
    const auto m = sys.m();
    Matrix out(n + m, n + m);
    out.topLeftCorner(n, n) = sys.A() + shift * Matrix::Identity(n, n);
    out.topRightCorner(n, m) = sys.B();
    out.bottomLeftCorner(m, n) = -r * k;
    out.bottomRightCorner(m, m) = -r;
    return out;
}

}  // namespace

Matrix phi_minus(const LtiSystem& sys, const Matrix& r, const Matrix& k) {
    return phi(sys, r, k, -1.0);
}

Matrix phi_plus(const LtiSystem& sys, const Matrix& r, const Matrix& k) {
    return phi(sys, r, k, 1.0);
}

IterationTrace kleinman_iterate(const LtiSystem& sys, const Matrix& q, const Matrix& r,
                                const Matrix& k0, const IterationOptions& options) {
    check_weights(sys, q, r, k0);
    if (!is_hurwitz(sys.closed_loop(k0))) {
        throw StabilityError("kleinman_iterate: K0 is not stabilizing");
    }
    const auto r_ldlt = r.ldlt();
    IterationTrace trace;
    Matrix k = k0;
    for (int i = 1; i <= options.max_iters; ++i) {
        const Matrix acl = sys.closed_loop(k);
        const Matrix w = q + k.transpose() * r * k;
        IterationRecord rec;
        rec.index = i;
        rec.P = solve_lyapunov(acl, w);
        rec.residual = (rec.P * acl + acl.transpose() * rec.P + w).norm();
        rec.K = r_ldlt.solve(sys.B().transpose() * rec.P);
        rec.gap = (rec.K - k).norm();
        rec.stability_margin = sys.stability_margin(rec.K);
        k = rec.K;
        trace.final_gap = rec.gap;
        trace.records.push_back(std::move(rec));
        if (trace.final_gap <= options.eps) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

Matrix algorithm1_step(const LtiSystem& sys, const Matrix& q, const Matrix& r, const Matrix& k,
                       SylvesterMethod method) {
    check_weights(sys, q, r, k);
    if (!is_hurwitz(sys.closed_loop(k))) {
        throw StabilityError("algorithm1_step: gain is not stabilizing");
    }
    const auto n = sys.n();
    const auto m = sys.m();
    SylvesterTransposeProblem prob;
    prob.left = phi_minus(sys, r, k);
    prob.right = phi_plus(sys, r, k);
    prob.constant = Matrix::Zero(n + m, n + m);
    prob.constant.topLeftCorner(n, n) = q + k.transpose() * r * k;
    Matrix e = Matrix::Zero(n, n + m);
    e.leftCols(n) = Matrix::Identity(n, n);

    try {
        return method == SylvesterMethod::Kronecker ? solve_sylvester_transpose_kron(prob, e).theta
                                                    : solve_sylvester_transpose(prob, e).theta;
    } catch (const ConvergenceError& err) {
        throw ConvergenceError(std::string("algorithm1_step: ") + err.what(),
                               err.last_residual());
    } catch (const SingularityError& err) {
        throw SingularityError(std::string("algorithm1_step: ") + err.what());
    }
}

IterationTrace algorithm1(const LtiSystem& sys, const Matrix& q, const Matrix& r,
                          const Matrix& k0, const IterationOptions& options,
                          SylvesterMethod method) {
    const auto n = sys.n();
    IterationTrace trace;
    Matrix k = k0;
    for (int i = 1; i <= options.max_iters; ++i) {
        const Matrix theta = algorithm1_step(sys, q, r, k, method);
        IterationRecord rec;
        rec.index = i;
        rec.P = symmetrize(theta.topRows(n));
        rec.K = theta.bottomRows(sys.m());
        const Matrix acl = sys.closed_loop(k);
        rec.residual =
            (rec.P * acl + acl.transpose() * rec.P + q + k.transpose() * r * k).norm();
        rec.gap = (rec.K - k).norm();
        rec.stability_margin = sys.stability_margin(rec.K);
        k = rec.K;
        trace.final_gap = rec.gap;
        trace.records.push_back(std::move(rec));
        if (trace.final_gap <= options.eps) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out << "i,gap,residual,stability_margin\n" << std::setprecision(17);
    for (const auto& rec : trace.records) {
        out << rec.index << ',' << rec.gap << ',' << rec.residual << ',';
        if (rec.stability_margin) out << *rec.stability_margin;
        out << '\n';
    }
}

}  // namespace ctlqr
