#include "ctlqr/init_gain.hpp"

#include "ctlqr/errors.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>
#include <string>

namespace ctlqr {

VirtualSystem virtual_system(const DataMatrices& d) {
    if (!verify_rank(d)) {
        throw DataError("virtual_system: rank([X; U]) < n + m");
    }
    if (numerical_rank(d.X) != d.n()) {
        throw DataError("virtual_system: X does not have full row rank");
    }
    VirtualSystem v;
    v.F = pinv(d.X);
    v.G = null_basis(d.X);
    v.Abar = d.Xtilde * v.F;
    v.Bbar = d.Xtilde * v.G;
    return v;
}

PoleSpec parse_pole_spec(const std::string& text) {
    PoleSpec spec;
    static const std::regex item(
        R"(^\s*([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)\s*(?:([+-])\s*([0-9.]+(?:[eE][+-]?[0-9]+)?)\s*[ij])?\s*$)");
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find_first_of(",;", start);
        const std::string token =
            text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        std::smatch match;
        if (!std::regex_match(token, match, item)) {
            throw ConfigError("pole spec: cannot parse '" + token + "'");
        }
        const double re = std::stod(match[1].str());
        double im = 0.0;
        if (match[2].matched) {
            im = std::stod(match[3].str());
            if (match[2].str() == "-") im = -im;
        }
        spec.poles.emplace_back(re, im);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return spec;
}

namespace {

void validate_poles(const std::vector<std::complex<double>>& poles, Eigen::Index n) {
    if (static_cast<Eigen::Index>(poles.size()) != n) {
        throw ConfigError("pole spec: expected " + std::to_string(n) + " poles, got " +
                          std::to_string(poles.size()));
    }
    for (const auto& p : poles) {
        if (!(p.real() < 0.0)) {
            throw ConfigError("pole spec: target poles must lie in the open left half-plane");
        }
    }
    // Conjugate closure: match every pole with an unused conjugate partner.
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        const double scale = std::max(1.0, std::abs(poles[i]));
        if (std::abs(poles[i].imag()) <= 1e-9 * scale) {
            used[i] = true;
            continue;
        }
        bool found = false;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (!used[j] && std::abs(poles[j] - std::conj(poles[i])) <= 1e-9 * scale) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) {
            throw ConfigError("pole spec: complex poles must come in conjugate pairs");
        }
    }
}

// Monic characteristic polynomial coefficients, highest degree first.
std::vector<double> char_poly(const std::vector<std::complex<double>>& poles) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& p : poles) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= p * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    std::transform(c.begin(), c.end(), out.begin(), [](auto z) { return z.real(); });
    return out;
}

Matrix ackermann(const Matrix& a, const Vector& b, const std::vector<std::complex<double>>& poles) {
    const auto n = a.rows();
    const Matrix ctrb = controllability_matrix(a, b);
    const std::vector<double> coeffs = char_poly(poles);
    // Horner evaluation of the desired polynomial at A.
    Matrix phi = Matrix::Identity(n, n) * coeffs[0];
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
        phi = phi * a + coeffs[i] * Matrix::Identity(n, n);
    }
    Matrix last = Matrix::Zero(1, n);
    last(0, n - 1) = 1.0;
    // e_n^T C^{-1} phi(A), via a solve with C^T.
    const Matrix row = ctrb.transpose().partialPivLu().solve(last.transpose()).transpose();
    return row * phi;
}

}  // namespace

Matrix assign_eigenvalues(const Matrix& a, const Matrix& b,
                          const std::vector<std::complex<double>>& poles) {
    require_square(a, "assign_eigenvalues");
    const auto n = a.rows();
    if (b.rows() != n || b.cols() < 1) {
        throw DimensionError("assign_eigenvalues: B must be n x k with k >= 1");
    }
    validate_poles(poles, n);

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    Matrix pre = Matrix::Zero(b.cols(), n);
    constexpr int kAttempts = 32;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        // After a few failures, add a random pre-feedback to break non-cyclic structure.
        if (attempt >= 4) {
            pre = Matrix::NullaryExpr(b.cols(), n, [&] { return gauss(rng); });
        }
        const Vector v = Vector::NullaryExpr(b.cols(), [&] { return gauss(rng); }).normalized();
        const Vector bv = b * v;
        const Matrix shifted = a - b * pre;
        const Matrix ctrb = controllability_matrix(shifted, bv);
        if (numerical_rank(ctrb) < n) {
            continue;
        }
        const Matrix k_single = ackermann(shifted, bv, poles);
        const Matrix k = pre + v * k_single;
        if (is_hurwitz(a - b * k)) {
            return k;
        }
    }
    throw StabilizationError("assign_eigenvalues: could not place the requested poles");
}

InitialGain data_stabilizing_gain(const DataMatrices& d, const PoleSpec& spec) {
    if (!spec.poles.empty()) {
        validate_poles(spec.poles, d.n());
    }
    const VirtualSystem v = virtual_system(d);
    const auto n = d.n();

    Matrix kbar;
    if (!spec.poles.empty()) {
        kbar = assign_eigenvalues(v.Abar, v.Bbar, spec.poles);
    } else {
        // Bass: (Abar + beta I) W + W (Abar + beta I)^T = 2 Bbar Bbar^T with
        // beta > max(0, -min Re eig(Abar)) gives Hurwitz Abar - Bbar Bbar^T W^{-1}.
        const Spectrum s = eig(v.Abar);
        const double min_re = s.size() ? s.eigenvalues.real().minCoeff() : 0.0;
        const double beta = std::max(0.0, -min_re) + 1.0;
        const Matrix shifted = -(v.Abar + beta * Matrix::Identity(n, n)).transpose();
        Matrix w;
        try {
            w = solve_lyapunov(shifted, 2.0 * v.Bbar * v.Bbar.transpose());
        } catch (const StabilityError&) {
            throw StabilizationError("data_stabilizing_gain: shifted virtual matrix not anti-stable");
        }
        const Eigen::LDLT<Matrix> w_ldlt(w);
        if (w_ldlt.info() != Eigen::Success || !w_ldlt.isPositive() ||
            min_symmetric_eigenvalue(w) <= rank_tolerance(w)) {
            throw StabilizationError(
                "data_stabilizing_gain: virtual pair is not numerically controllable (cond(X) = " +
                std::to_string(cond(d.X)) + ")");
        }
        const Matrix k_bass = w_ldlt.solve(v.Bbar).transpose();
        kbar = k_bass;
        try {
            const LtiSystem virt(v.Abar, v.Bbar);
            const auto k_cols = v.Bbar.cols();
            const AreSolution lqr = solve_are(virt, Matrix::Identity(n, n),
                                              Matrix::Identity(k_cols, k_cols), k_bass);
            if (is_hurwitz(v.Abar - v.Bbar * lqr.K)) {
                kbar = lqr.K;
            }
        } catch (const Error&) {
            // Bass gain is already stabilizing; keep it.
        }
    }

    InitialGain out;
    out.Kbar = kbar;
    const Matrix mix = v.F - v.G * kbar;
    out.K0 = -d.U * mix;
    out.closed_loop_spectrum = eig(d.Xtilde * mix);
    out.cond_X = cond(d.X);
    out.cond_Z = cond(d.Z());
    if (!out.closed_loop_spectrum.is_hurwitz()) {
        throw StabilizationError(
            "data_stabilizing_gain: data closed loop not Hurwitz (max Re = " +
            std::to_string(out.closed_loop_spectrum.max_real()) +
            ", cond(X) = " + std::to_string(out.cond_X) + ")");
    }
    return out;
}

}  // namespace ctlqr
