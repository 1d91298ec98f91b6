#include "ctlqr/excitation.hpp"

#include "ctlqr/errors.hpp"
#include "ctlqr/matrix_io.hpp"

#include <fstream>
#include <random>
#include <string>

namespace ctlqr {

Matrix hankel(const Matrix& mu, Eigen::Index depth) {
    const auto m = mu.rows();
    const auto len = mu.cols();
    if (depth < 1) {
        throw DimensionError("hankel: depth must be at least 1");
    }
    if (len < depth) {
        throw DimensionError("hankel: sequence of length " + std::to_string(len) +
                             " is shorter than depth " + std::to_string(depth));
    }
    const auto cols = len - depth + 1;
    Matrix h(m * depth, cols);
    for (Eigen::Index i = 0; i < depth; ++i) {
        h.middleRows(i * m, m) = mu.middleCols(i, cols);
    }
    return h;
}

bool is_pe(const Matrix& mu, Eigen::Index depth) {
    if (depth < 1 || mu.cols() < depth || mu.rows() < 1) {
        return false;
    }
    return numerical_rank(hankel(mu, depth)) == mu.rows() * depth;
}

PeSequence gen_pe_sequence(Eigen::Index m, Eigen::Index depth, Eigen::Index length,
                           std::uint64_t seed) {
    if (m < 1 || depth < 1) {
        throw ConfigError("gen_pe_sequence: m and L must be positive");
    }
    if (length < min_pe_length(m, depth)) {
        throw ConfigError("gen_pe_sequence: N = " + std::to_string(length) +
                          " is below the minimum (m+1)L-1 = " +
                          std::to_string(min_pe_length(m, depth)));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    constexpr int kMaxDraws = 100;
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        Matrix mu(m, length);
        for (Eigen::Index j = 0; j < length; ++j) {
            for (Eigen::Index i = 0; i < m; ++i) {
                mu(i, j) = dist(rng);
            }
        }
        const double peak = mu.cwiseAbs().maxCoeff();
        if (peak == 0.0) {
            continue;
        }
        mu /= peak;
        if (is_pe(mu, depth)) {
            return PeSequence{std::move(mu), depth};
        }
    }
    throw GenerationError("gen_pe_sequence: no PE sequence after " + std::to_string(kMaxDraws) +
                          " draws");
}

void save_sequence(const std::filesystem::path& path, const Matrix& mu) {
    // One row per mu_k, i.e. the transpose of the m x N storage.
    save_matrix(path, mu.transpose());
}

Matrix load_sequence(const std::filesystem::path& path) {
    return load_matrix(path).transpose();
}

}  // namespace ctlqr
