#include "ctlqr/data_pipeline.hpp"

#include "ctlqr/errors.hpp"
#include "ctlqr/matrix_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace ctlqr {

Matrix DataMatrices::Z() const {
    Matrix z(n() + m(), N());
    z << X, U;
    return z;
}

DataMatrices build_data_matrices(const Trajectory& traj, double T, Quadrature mode) {
    const auto samples = traj.samples();
    if (samples < 2 || static_cast<Eigen::Index>(traj.times.size()) != samples ||
        traj.inputs.cols() != samples) {
        throw ConfigError("build_data_matrices: trajectory is empty or inconsistent");
    }
    if (!(T > 0.0)) {
        throw ConfigError("build_data_matrices: T must be positive");
    }
    const double dt = traj.times[1] - traj.times[0];
    PcpeInput probe;
    probe.T = T;
    probe.dt = dt;
    const auto steps = probe.steps_per_interval();
    if ((samples - 1) % steps != 0) {
        throw ConfigError("build_data_matrices: trajectory length is not a whole number of "
                          "intervals of length T");
    }
    const auto N = (samples - 1) / steps;
    const auto n = traj.states.rows();
    const auto m = traj.inputs.rows();

    bool exact = false;
    switch (mode) {
        case Quadrature::Auto:
            exact = traj.interval_integrals.has_value();
            break;
        case Quadrature::Exact:
            if (!traj.interval_integrals) {
                throw ConfigError("build_data_matrices: exact quadrature requested but the "
                                  "trajectory has no exact-integral data");
            }
            exact = true;
            break;
        case Quadrature::Trapezoid:
            break;
    }
    if (exact && traj.interval_integrals->cols() != N) {
        throw ConfigError("build_data_matrices: exact-integral data does not match N");
    }

    DataMatrices d;
    d.T = T;
    d.dt = dt;
    d.quadrature = exact ? "exact" : "trapezoid";
    d.Xtilde.resize(n, N);
    d.X.resize(n, N);
    d.U.resize(m, N);
    for (Eigen::Index j = 0; j < N; ++j) {
        const auto first = j * steps;
        const auto last = first + steps;
        d.Xtilde.col(j) = traj.states.col(last) - traj.states.col(first);
        if (exact) {
            d.X.col(j) = traj.interval_integrals->col(j);
        } else {
            // Summing offsets from the first sample keeps roundoff proportional to
            // the in-interval motion rather than to the state magnitude.
            const Vector base = traj.states.col(first);
            Vector acc = 0.5 * (traj.states.col(last) - base);
            for (auto k = first + 1; k < last; ++k) {
                acc += traj.states.col(k) - base;
            }
            d.X.col(j) = T * base + dt * acc;
        }
        // The input is held over [jT, (j+1)T), so its integral is T times the left sample.
        d.U.col(j) = T * traj.inputs.col(first);
    }
    return d;
}

bool verify_rank(const DataMatrices& d) {
    if (d.N() < d.n() + d.m()) {
        return false;
    }
    return numerical_rank(d.Z()) == d.n() + d.m();
}

namespace {

ColumnSelection gather(const DataMatrices& d, std::vector<Eigen::Index> eta) {
    ColumnSelection sel;
    const auto k = static_cast<Eigen::Index>(eta.size());
    sel.Xeta.resize(d.n(), k);
    sel.Ueta.resize(d.m(), k);
    sel.Xtilde_eta.resize(d.n(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto j = eta[static_cast<std::size_t>(c)];
        sel.Xeta.col(c) = d.X.col(j);
        sel.Ueta.col(c) = d.U.col(j);
        sel.Xtilde_eta.col(c) = d.Xtilde.col(j);
    }
    sel.Zeta.resize(d.n() + d.m(), k);
    sel.Zeta << sel.Xeta, sel.Ueta;
    sel.eta = std::move(eta);
    sel.condition = cond(sel.Zeta);
    return sel;
}

}  // namespace

ColumnSelection select_columns(const DataMatrices& d) {
    const Matrix z = d.Z();
    const auto rows = z.rows();
    const auto cols = z.cols();
    if (cols < rows) {
        throw DataError("select_columns: only " + std::to_string(cols) + " columns for " +
                        std::to_string(rows) + " rows");
    }
    const double tol = rank_tolerance(z);
    Matrix residual = z;
    std::vector<bool> taken(static_cast<std::size_t>(cols), false);
    std::vector<Eigen::Index> eta;
    for (Eigen::Index step = 0; step < rows; ++step) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            const double nrm = residual.col(j).norm();
            if (nrm > best_norm) {
                best_norm = nrm;
                best = j;
            }
        }
        if (best < 0 || best_norm <= tol) {
            throw DataError("select_columns: data rank deficient after " + std::to_string(step) +
                            " of " + std::to_string(rows) + " columns");
        }
        taken[static_cast<std::size_t>(best)] = true;
        eta.push_back(best);
        const Vector q = residual.col(best) / best_norm;
        residual -= q * (q.transpose() * residual);
    }
    std::sort(eta.begin(), eta.end());
    return gather(d, std::move(eta));
}

ColumnSelection all_columns(const DataMatrices& d) {
    std::vector<Eigen::Index> eta(static_cast<std::size_t>(d.N()));
    for (Eigen::Index j = 0; j < d.N(); ++j) eta[static_cast<std::size_t>(j)] = j;
    return gather(d, std::move(eta));
}

void save_bundle(const std::filesystem::path& dir, const DataMatrices& d) {
    std::filesystem::create_directories(dir);
    save_matrix(dir / "Xtilde.txt", d.Xtilde);
    save_matrix(dir / "X.txt", d.X);
    save_matrix(dir / "U.txt", d.U);
    nlohmann::ordered_json meta;
    meta["n"] = d.n();
    meta["m"] = d.m();
    meta["N"] = d.N();
    meta["T"] = d.T;
    meta["dt"] = d.dt;
    meta["quadrature"] = d.quadrature;
    if (d.seed) {
        meta["seed"] = *d.seed;
    } else {
        meta["seed"] = nullptr;
    }
    std::ofstream out(dir / "meta.json");
    if (!out) {
        throw ConfigError("cannot write " + (dir / "meta.json").string());
    }
    out << meta.dump(2) << '\n';
}

DataMatrices load_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("bundle directory " + dir.string() + " does not exist");
    }
    DataMatrices d;
    try {
        d.Xtilde = load_matrix(dir / "Xtilde.txt");
        d.X = load_matrix(dir / "X.txt");
        d.U = load_matrix(dir / "U.txt");
    } catch (const ConfigError& e) {
        throw DataError(std::string("incomplete bundle: ") + e.what());
    }
    std::ifstream in(dir / "meta.json");
    if (!in) {
        throw DataError("incomplete bundle: missing meta.json");
    }
    try {
        const auto meta = nlohmann::json::parse(in);
        d.T = meta.at("T").get<double>();
        d.dt = meta.at("dt").get<double>();
        d.quadrature = meta.value("quadrature", std::string("trapezoid"));
        if (meta.contains("seed") && !meta["seed"].is_null()) {
            d.seed = meta["seed"].get<std::uint64_t>();
        }
        if (meta.at("N").get<Eigen::Index>() != d.X.cols()) {
            throw DataError("bundle: meta.json N disagrees with X");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bundle: bad meta.json: ") + e.what());
    }
    if (d.Xtilde.rows() != d.X.rows() || d.Xtilde.cols() != d.X.cols() ||
        d.U.cols() != d.X.cols() || d.X.rows() < 1 || d.U.rows() < 1) {
        throw DataError("bundle: Xtilde, X and U shapes are inconsistent");
    }
    return d;
}

}  // namespace ctlqr
