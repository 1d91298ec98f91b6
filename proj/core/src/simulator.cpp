#include "ctlqr/simulator.hpp"

#include "ctlqr/errors.hpp"
#include "ctlqr/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

namespace ctlqr {

LtiSystem::LtiSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    require_square(a_, "LtiSystem");
    if (a_.rows() < 1 || b_.cols() < 1) {
        throw DimensionError("LtiSystem: need n >= 1 and m >= 1");
    }
    if (b_.rows() != a_.rows()) {
        throw DimensionError("LtiSystem: B must have as many rows as A");
    }
    require_finite(a_, "LtiSystem A");
    require_finite(b_, "LtiSystem B");
}

Matrix LtiSystem::closed_loop(const Matrix& k) const {
    if (k.rows() != m() || k.cols() != n()) {
        throw DimensionError("closed_loop: gain must be m x n");
    }
    return a_ - b_ * k;
}

bool LtiSystem::is_controllable() const {
    return numerical_rank(controllability_matrix(a_, b_)) == n();
}

double LtiSystem::stability_margin(const Matrix& k) const {
    return -eig(closed_loop(k)).max_real();
}

void save_system(const std::filesystem::path& path, const LtiSystem& sys) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    write_matrix(out, sys.A());
    write_matrix(out, sys.B());
}

LtiSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open system file " + path.string());
    }
    Matrix a = read_matrix(in);
    Matrix b = read_matrix(in);
    return LtiSystem(std::move(a), std::move(b));
}

Eigen::Index PcpeInput::steps_per_interval() const {
    if (!(T > 0.0) || !(dt > 0.0)) {
        throw ConfigError("PCPE input: T and dt must be positive");
    }
    const double ratio = T / dt;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(steps * dt - T) > 1e-12 * T) {
        throw ConfigError("PCPE input: dt = " + std::to_string(dt) +
                          " does not divide T = " + std::to_string(T));
    }
    return static_cast<Eigen::Index>(steps);
}

Discretization discretize_exact(const LtiSystem& sys, double h) {
    const auto n = sys.n();
    const auto m = sys.m();
    Matrix aug = Matrix::Zero(2 * n + m, 2 * n + m);
    aug.topLeftCorner(n, n) = sys.A();
    aug.block(0, n, n, m) = sys.B();
    aug.block(n + m, 0, n, n) = Matrix::Identity(n, n);
    const Matrix e = matexp(aug, h);
    return Discretization{
        e.topLeftCorner(n, n),
        e.block(0, n, n, m),
        e.block(n + m, 0, n, n),
        e.block(n + m, n, n, m),
    };
}

Trajectory simulate_pcpe(const LtiSystem& sys, const PcpeInput& input, const Vector& x0) {
    const auto n = sys.n();
    const auto m = sys.m();
    if (input.m() != m) {
        throw DimensionError("simulate_pcpe: input dimension differs from B");
    }
    if (input.N() < 1) {
        throw ConfigError("simulate_pcpe: empty excitation sequence");
    }
    if (x0.size() != n) {
        throw DimensionError("simulate_pcpe: initial state has the wrong length");
    }
    const auto steps = input.steps_per_interval();
    const auto N = input.N();
    const auto samples = N * steps + 1;

    const Discretization step = discretize_exact(sys, input.dt);
    const Discretization interval = discretize_exact(sys, input.T);

    Trajectory traj;
    traj.times.resize(static_cast<std::size_t>(samples));
    traj.states.resize(n, samples);
    traj.inputs.resize(m, samples);
    Matrix integrals(n, N);

    // Interval endpoints come from the one-step interval map. Inside an interval
    // the recursion runs on the offset from the interval start, so roundoff scales
    // with the in-interval motion and never carries across intervals.
    // Ad - I = A * int_0^dt e^{A s} ds avoids cancellation.
    const Matrix ad_minus_i = sys.A() * step.Fd;
    Vector x = x0;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
        const Vector u = input.mu.col(i);
        integrals.col(i) = interval.Fd * x + interval.Gd * u;
        const Vector drift = ad_minus_i * x + step.Bd * u;
        Vector offset = Vector::Zero(n);
        for (Eigen::Index s = 0; s < steps; ++s, ++k) {
            traj.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * input.dt;
            traj.states.col(k) = x + offset;
            traj.inputs.col(k) = u;
            offset = step.Ad * offset + drift;
        }
        x = interval.Ad * x + interval.Bd * u;
    }
    traj.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * input.dt;
    traj.states.col(k) = x;
    traj.inputs.col(k) = input.mu.col(N - 1);
    traj.interval_integrals = std::move(integrals);
    return traj;
}

bool check_nonpathological(const Spectrum& spectrum, double T) {
    const auto& ev = spectrum.eigenvalues;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
            const double gap = std::abs(ev(i).imag() - ev(j).imag());
            if (gap < 1e-12) {
                continue;
            }
            const double period = 2.0 * std::numbers::pi / gap;
            const double k = std::round(T / period);
            if (k != 0.0 && std::abs(T - k * period) <= 1e-9 * std::max(1.0, T)) {
                return false;
            }
        }
    }
    return true;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    const auto n = traj.states.rows();
    const auto m = traj.inputs.rows();
    out << 't';
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    for (Eigen::Index i = 1; i <= m; ++i) out << ",u" << i;
    out << '\n' << std::setprecision(17);
    for (Eigen::Index k = 0; k < traj.samples(); ++k) {
        out << traj.times[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << traj.states(i, k);
        for (Eigen::Index i = 0; i < m; ++i) out << ',' << traj.inputs(i, k);
        out << '\n';
    }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trajectory " + path.string());
    }
    std::string header;
    std::getline(in, header);
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    {
        std::stringstream hs(header);
        std::string cell;
        std::getline(hs, cell, ',');
        if (cell != "t") {
            throw DataError("trajectory CSV: header must start with 't'");
        }
        while (std::getline(hs, cell, ',')) {
            if (!cell.empty() && cell[0] == 'x') {
                if (m > 0) throw DataError("trajectory CSV: state column after input column");
                ++n;
            } else if (!cell.empty() && cell[0] == 'u') {
                ++m;
            } else {
                throw DataError("trajectory CSV: unexpected column '" + cell + "'");
            }
        }
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("trajectory CSV: malformed value '" + cell + "'");
            }
        }
        if (static_cast<Eigen::Index>(row.size()) != 1 + n + m) {
            throw DataError("trajectory CSV: ragged row");
        }
        rows.push_back(std::move(row));
    }
    Trajectory traj;
    const auto samples = static_cast<Eigen::Index>(rows.size());
    traj.times.resize(rows.size());
    traj.states.resize(n, samples);
    traj.inputs.resize(m, samples);
    for (Eigen::Index k = 0; k < samples; ++k) {
        const auto& row = rows[static_cast<std::size_t>(k)];
        traj.times[static_cast<std::size_t>(k)] = row[0];
        for (Eigen::Index i = 0; i < n; ++i) traj.states(i, k) = row[1 + i];
        for (Eigen::Index i = 0; i < m; ++i) traj.inputs(i, k) = row[1 + n + i];
    }
    return traj;
}

}  // namespace ctlqr
