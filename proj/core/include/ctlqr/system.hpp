#pragma once

#include "ctlqr/linalg.hpp"

#include <filesystem>

namespace ctlqr {

/// Continuous-time plant x' = A x + B u.
class LtiSystem {
public:
    LtiSystem() = default;
    /// Validates shapes and finiteness. Controllability is not enforced here;
    /// see is_controllable().
    LtiSystem(Matrix a, Matrix b);

    const Matrix& A() const { return a_; }
    const Matrix& B() const { return b_; }
    Eigen::Index n() const { return a_.rows(); }
    Eigen::Index m() const { return b_.cols(); }

    Matrix closed_loop(const Matrix& k) const;
    bool is_controllable() const;
    /// -max Re eig(A - B K); positive iff K is stabilizing.
    double stability_margin(const Matrix& k) const;

private:
    Matrix a_;
    Matrix b_;
};

/// System file: the A block followed by the B block, both in matrix text format.
void save_system(const std::filesystem::path& path, const LtiSystem& sys);
LtiSystem load_system(const std::filesystem::path& path);

}  // namespace ctlqr
