#pragma once

#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/linalg.hpp"

#include <complex>
#include <vector>

namespace ctlqr {

/// Abar = Xtilde F and Bbar = Xtilde G, with F = pinv(X) and G an orthonormal
/// basis of ker X. These are not estimates of (A, B); Bbar has N - n columns.
struct VirtualSystem {
    Matrix Abar;
    Matrix Bbar;
    Matrix F;
    Matrix G;
};

VirtualSystem virtual_system(const DataMatrices& d);

/// Target closed-loop poles; an empty list selects the default policy
/// (Bass pre-stabilization followed by an identity-weight LQR on the virtual pair).
struct PoleSpec {
    std::vector<std::complex<double>> poles;
};

/// Parses "re[+/-im j]" entries separated by commas or semicolons, e.g. "-1,-2+1j,-2-1j".
PoleSpec parse_pole_spec(const std::string& text);

struct InitialGain {
    Matrix K0;
    Matrix Kbar;
    /// Eigenvalues of Xtilde (F - G Kbar), computed from data alone.
    Spectrum closed_loop_spectrum;
    double cond_X = 0.0;
    double cond_Z = 0.0;
};

/// K0 = -U (F - G Kbar) with Kbar making Abar - Bbar Kbar Hurwitz. Since
/// Xtilde (F - G Kbar) = A - B K0 on exact data, the returned spectrum
/// certifies K0 without a model.
InitialGain data_stabilizing_gain(const DataMatrices& d, const PoleSpec& spec = {});

/// Multi-input eigenvalue assignment: reduce to a single input through a
/// deterministic random combination of the columns of B and apply
/// Ackermann's formula. Returns K with eig(A - B K) = poles.
Matrix assign_eigenvalues(const Matrix& a, const Matrix& b,
                          const std::vector<std::complex<double>>& poles);

}  // namespace ctlqr
