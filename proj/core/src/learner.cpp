#include "ctlqr/learner.hpp"

#include "ctlqr/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace ctlqr {

IterationMatrices build_iteration_matrices(const ColumnSelection& sel, const Matrix& k,
                                           const Matrix& q, const Matrix& r) {
    const auto n = sel.Xeta.rows();
    const auto m = sel.Ueta.rows();
    const auto cols = sel.Xeta.cols();
    if (k.rows() != m || k.cols() != n) {
        throw DimensionError("build_iteration_matrices: gain must be m x n");
    }
    if (q.rows() != n || q.cols() != n || r.rows() != m || r.cols() != m) {
        throw DimensionError("build_iteration_matrices: weights do not match the data");
    }
    if (sel.Ueta.cols() != cols || sel.Xtilde_eta.cols() != cols || sel.Xtilde_eta.rows() != n) {
        throw DimensionError("build_iteration_matrices: inconsistent column selection");
    }
    const Matrix input_rows = -r * (k * sel.Xeta + sel.Ueta);

    IterationMatrices out;
    out.Yminus.resize(n + m, cols);
    out.Yminus << sel.Xtilde_eta - sel.Xeta, input_rows;
    out.Yplus.resize(n + m, cols);
    out.Yplus << sel.Xtilde_eta + sel.Xeta, input_rows;
    out.Qi = sel.Xeta.transpose() * (q + k.transpose() * r * k) * sel.Xeta;
    return out;
}

PolicyBlocks extract_policy(const Matrix& theta, Eigen::Index n) {
    if (n < 1 || theta.rows() <= n || theta.cols() != n) {
        throw DimensionError("extract_policy: Theta must be (n+m) x n with m >= 1");
    }
    const Matrix top = theta.topRows(n);
    const double asym = (top - top.transpose()).norm();
    if (asym > 1e-7 * top.norm()) {
        std::ostringstream msg;
        msg << "extract_policy: value block asymmetric (" << asym << " vs norm " << top.norm()
            << ")";
        throw ConsistencyError(msg.str());
    }
    return PolicyBlocks{symmetrize(top), theta.bottomRows(theta.rows() - n)};
}

namespace {

struct StepResult {
    Matrix theta;
    double residual = 0.0;
};

// `work` is either `sel` or its congruence image; both give the same Theta.
StepResult solve_step(const ColumnSelection& sel, const ColumnSelection& work, const Matrix& k,
                      const Matrix& q, const Matrix& r, const LearnerOptions& options,
                      const std::optional<Matrix>& warm) {
    const IterationMatrices mats = build_iteration_matrices(work, k, q, r);
    const SylvesterTransposeProblem prob{mats.Yminus, mats.Yplus, mats.Qi};

    SylvesterSolution sol;
    if (options.method == SylvesterMethod::Kronecker) {
        sol = solve_sylvester_transpose_kron(prob, work.Xeta);
    } else {
        SylvesterOptions so = options.sylvester;
        if (options.warm_start && warm) so.initial_guess = *warm;
        sol = solve_sylvester_transpose(prob, work.Xeta, so);
    }
    if (&work == &sel) {
        return {sol.theta, sol.residual};
    }
    const IterationMatrices orig = build_iteration_matrices(sel, k, q, r);
    const SylvesterTransposeProblem orig_prob{orig.Yminus, orig.Yplus, orig.Qi};
    return {sol.theta, sylvester_transpose_residual(orig_prob, sel.Xeta, sol.theta).norm()};
}

std::string cond_note(double c) {
    std::ostringstream s;
    s << " (cond(Z_eta) = " << c << ")";
    return s.str();
}

}  // namespace

ColumnSelection congruence_image(const ColumnSelection& sel) {
    if (sel.Zeta.rows() != sel.Zeta.cols()) {
        throw DimensionError("congruence_image: Z_eta must be square");
    }
    const Matrix w = sel.Zeta.partialPivLu().inverse();
    ColumnSelection out = sel;
    out.Xeta = sel.Xeta * w;
    out.Ueta = sel.Ueta * w;
    out.Xtilde_eta = sel.Xtilde_eta * w;
    out.Zeta = sel.Zeta * w;
    return out;
}

LearnedPolicy algorithm2(const DataMatrices& d, const Matrix& q, const Matrix& r,
                         const Matrix& k0, const LearnerOptions& options) {
    if (!verify_rank(d)) {
        throw DataError("algorithm2: rank([X; U]) < n + m; the data are not sufficiently exciting");
    }
    return algorithm2(d, select_columns(d), q, r, k0, options);
}

LearnedPolicy algorithm2(const DataMatrices& d, const ColumnSelection& sel, const Matrix& q,
                         const Matrix& r, const Matrix& k0, const LearnerOptions& options) {
    const auto n = d.n();
    const auto m = d.m();
    if (!(options.eps > 0.0) && options.stop_on_convergence) {
        throw ConfigError("algorithm2: eps must be positive");
    }
    if (options.max_iters < 1) {
        throw ConfigError("algorithm2: max_iters must be at least 1");
    }
    if (k0.rows() != m || k0.cols() != n) {
        throw DimensionError("algorithm2: K0 must be m x n");
    }
    if (static_cast<Eigen::Index>(sel.eta.size()) < n + m) {
        throw DataError("algorithm2: column selection has fewer than n + m columns");
    }

    std::optional<ColumnSelection> image;
    if (options.precondition && sel.Zeta.rows() == sel.Zeta.cols()) {
        image = congruence_image(sel);
    }
    const ColumnSelection& work = image ? *image : sel;

    LearnedPolicy out;
    out.selection = sel;
    std::optional<ColumnSelection> full;  // built lazily for the fallback path
    std::optional<Matrix> warm;
    Matrix k = k0;

    for (int i = 1; i <= options.max_iters; ++i) {
        StepResult step;
        try {
            step = solve_step(sel, work, k, q, r, options, warm);
        } catch (const SingularityError& e) {
            throw StabilityError(std::string("algorithm2: iteration ") + std::to_string(i) +
                                 ": equation has no unique solution; the current gain is "
                                 "likely not stabilizing" + cond_note(sel.condition));
        } catch (const ConvergenceError& e) {
            if (!options.full_data_fallback || sel.eta.size() == static_cast<std::size_t>(d.N())) {
                throw ConvergenceError(std::string("algorithm2: ") + e.what() +
                                           cond_note(sel.condition),
                                       e.last_residual(), sel.condition);
            }
            if (!full) full = all_columns(d);
            try {
                step = solve_step(*full, *full, k, q, r, options, warm);
            } catch (const ConvergenceError& e2) {
                throw ConvergenceError(std::string("algorithm2: full-data retry failed: ") +
                                           e2.what() + cond_note(sel.condition),
                                       e2.last_residual(), sel.condition);
            }
        }

        PolicyBlocks blocks = extract_policy(step.theta, n);
        const double min_eig = min_symmetric_eigenvalue(blocks.P);
        if (min_eig < -1e-8 * std::max(1.0, blocks.P.norm())) {
            throw StabilityError("algorithm2: value matrix at iteration " + std::to_string(i) +
                                 " is indefinite (min eig " + std::to_string(min_eig) +
                                 "); the gain it evaluates is not stabilizing");
        }

        IterationRecord rec;
        rec.index = i;
        rec.gap = (blocks.K - k).norm();
        rec.residual = step.residual;
        if (options.audit) rec.stability_margin = options.audit->stability_margin(blocks.K);
        rec.K = blocks.K;
        rec.P = std::move(blocks.P);
        warm = std::move(step.theta);
        k = rec.K;
        out.trace.final_gap = rec.gap;
        out.trace.records.push_back(std::move(rec));
        if (options.stop_on_convergence && out.trace.final_gap <= options.eps) {
            out.trace.converged = true;
            break;
        }
    }
    if (!options.stop_on_convergence) {
        out.trace.converged = out.trace.final_gap <= options.eps;
    }
    out.K = k;
    out.P = out.trace.records.back().P;
    return out;
}

}  // namespace ctlqr
