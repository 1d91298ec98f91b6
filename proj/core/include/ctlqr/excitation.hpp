#pragma once

#include "ctlqr/linalg.hpp"

#include <cstdint>
#include <filesystem>

namespace ctlqr {

/// A sequence mu_0..mu_{N-1} (columns of an m x N matrix) certified
/// persistently exciting of the stated order.
struct PeSequence {
    Matrix mu;
    Eigen::Index order = 0;
};

/// Depth-L block Hankel matrix, (mL) x (N-L+1), block (i, j) = mu_{i+j}.
Matrix hankel(const Matrix& mu, Eigen::Index depth);

/// rank(H_L(mu)) == m L, using the shared numerical-rank threshold.
bool is_pe(const Matrix& mu, Eigen::Index depth);

/// Shortest sequence that can be PE of order L: (m + 1) L - 1.
inline Eigen::Index min_pe_length(Eigen::Index m, Eigen::Index depth) {
    return (m + 1) * depth - 1;
}

/// Entries uniform on [-1, 1], rescaled to unit max-norm, redrawn until
/// is_pe holds. Deterministic per seed.
PeSequence gen_pe_sequence(Eigen::Index m, Eigen::Index depth, Eigen::Index length,
                           std::uint64_t seed);

/// Sequence file: "N m" header, then N rows of m entries.
void save_sequence(const std::filesystem::path& path, const Matrix& mu);
Matrix load_sequence(const std::filesystem::path& path);

}  // namespace ctlqr
