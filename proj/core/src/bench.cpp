#include "ctlqr/bench.hpp"

#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/errors.hpp"
#include "ctlqr/excitation.hpp"
#include "ctlqr/learner.hpp"
#include "ctlqr/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace ctlqr {

void BenchConfig::validate() const {
    if (dims.empty()) throw ConfigError("bench: dims is empty");
    for (auto n : dims) {
        if (n < 1) throw ConfigError("bench: every dimension must be >= 1");
    }
    if (m < 1) throw ConfigError("bench: m must be >= 1");
    if (!(q_weight > 0.0) || !(r_weight > 0.0)) throw ConfigError("bench: weights must be positive");
    if (trials < 1 || iterations < 1) throw ConfigError("bench: trials and iterations must be >= 1");
    if (workers < 1) throw ConfigError("bench: workers must be >= 1");
    if (repeats < 1) throw ConfigError("bench: repeats must be >= 1");
    PcpeInput probe;
    probe.T = T;
    probe.dt = dt;
    probe.steps_per_interval();
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("bench config: bad number for " + key + ": '" + value + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("bench config: bad integer for " + key + ": '" + value + "'");
}

}  // namespace

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open bench config " + path.string());
    }
    BenchConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("bench config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dims") {
            cfg.dims.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                cfg.dims.push_back(static_cast<Eigen::Index>(parse_int(key, trim(item))));
            }
        } else if (key == "m") {
            cfg.m = static_cast<Eigen::Index>(parse_int(key, value));
        } else if (key == "q_weight") {
            cfg.q_weight = parse_double(key, value);
        } else if (key == "r_weight") {
            cfg.r_weight = parse_double(key, value);
        } else if (key == "T") {
            cfg.T = parse_double(key, value);
        } else if (key == "dt") {
            cfg.dt = parse_double(key, value);
        } else if (key == "trials") {
            cfg.trials = static_cast<int>(parse_int(key, value));
        } else if (key == "iterations") {
            cfg.iterations = static_cast<int>(parse_int(key, value));
        } else if (key == "repeats") {
            cfg.repeats = static_cast<int>(parse_int(key, value));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_int(key, value));
        } else if (key == "sequential_timing") {
            if (value == "true" || value == "1") {
                cfg.sequential_timing = true;
            } else if (value == "false" || value == "0") {
                cfg.sequential_timing = false;
            } else {
                throw ConfigError("bench config: sequential_timing must be true or false");
            }
        } else {
            throw ConfigError("bench config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

LtiSystem random_controllable_system(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                                     double re_lo, double re_hi) {
    if (n < 1 || m < 1) {
        throw ConfigError("random system: n and m must be >= 1");
    }
    if (!(re_lo <= re_hi)) {
        throw ConfigError("random system: empty real-part range");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> real_part(re_lo, re_hi);
    std::uniform_real_distribution<double> imag_part(0.1, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> gauss;

    constexpr int kMaxDraws = 100;
    for (int draw = 0; draw < kMaxDraws; ++draw) {
        Matrix d = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n;) {
            if (n - i >= 2 && coin(rng) < 0.5) {
                const double re = real_part(rng);
                const double im = imag_part(rng);
                d(i, i) = re;
                d(i + 1, i + 1) = re;
                d(i, i + 1) = im;
                d(i + 1, i) = -im;
                i += 2;
            } else {
                d(i, i) = real_part(rng);
                i += 1;
            }
        }
        const Matrix g = Matrix::NullaryExpr(n, n, [&] { return gauss(rng); });
        const Matrix orth = Eigen::HouseholderQR<Matrix>(g).householderQ();
        Matrix a = orth * d * orth.transpose();
        Matrix b = Matrix::NullaryExpr(n, m, [&] { return gauss(rng); });
        LtiSystem sys(std::move(a), std::move(b));
        if (sys.is_controllable()) {
            return sys;
        }
    }
    throw GenerationError("random system: no controllable draw after " + std::to_string(kMaxDraws) +
                          " attempts");
}

LtiSystem random_stable_system(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
    return random_controllable_system(n, m, seed, -2.0, -0.2);
}

std::uint64_t trial_seed(std::uint64_t seed, Eigen::Index n, int trial) {
    // splitmix64 over the packed key
    std::uint64_t z = seed ^ (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(trial);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

struct MethodRun {
    BenchRow row;
    std::vector<Matrix> gains;
};

std::vector<BenchRow> run_trial(const BenchConfig& cfg, Eigen::Index n, int trial) {
    const auto m = cfg.m;
    const Matrix q = cfg.q_weight * Matrix::Identity(n, n);
    const Matrix r = cfg.r_weight * Matrix::Identity(m, m);
    const std::uint64_t seed = trial_seed(cfg.seed, n, trial);

    std::vector<MethodRun> runs(2);
    runs[0].row.method = SylvesterMethod::Iterative;
    runs[1].row.method = SylvesterMethod::Kronecker;
    for (auto& run : runs) {
        run.row.n = n;
        run.row.trial = trial;
        run.row.trace_diff = std::numeric_limits<double>::quiet_NaN();
        run.row.k_error = std::numeric_limits<double>::quiet_NaN();
        run.row.k_rel_error = std::numeric_limits<double>::quiet_NaN();
        run.row.cond_zeta = std::numeric_limits<double>::quiet_NaN();
    }

    try {
        const LtiSystem sys = random_stable_system(n, m, seed);
        const PeSequence pe = gen_pe_sequence(m, n + 1, cfg.samples_for(n), seed ^ 0xa5a5a5a5ULL);
        PcpeInput input{pe.mu, cfg.T, cfg.dt};
        const Trajectory traj = simulate_pcpe(sys, input, Vector::Zero(n));
        DataMatrices d = build_data_matrices(traj, cfg.T, Quadrature::Trapezoid);
        d.seed = seed;
        const Matrix k0 = Matrix::Zero(m, n);
        const AreSolution truth = solve_are(sys, q, r, k0);
        const double k_norm = std::max(truth.K.norm(), std::numeric_limits<double>::min());
        const ColumnSelection sel = select_columns(d);

        // Alternate which method runs first so neither is systematically charged
        // for cold caches.
        const std::size_t first = static_cast<std::size_t>(trial & 1);
        for (std::size_t slot = 0; slot < runs.size(); ++slot) {
            auto& run = runs[(slot + first) % runs.size()];
            run.row.cond_zeta = sel.condition;
            LearnerOptions opts;
            opts.method = run.row.method;
            opts.max_iters = cfg.iterations;
            opts.stop_on_convergence = false;
            try {
                // Best of `repeats` identical runs: the computation is deterministic, so
                // the minimum strips scheduler noise without biasing either method.
                std::optional<LearnedPolicy> kept;
                double best = std::numeric_limits<double>::infinity();
                for (int rep = 0; rep < cfg.repeats; ++rep) {
                    const auto start = std::chrono::steady_clock::now();
                    LearnedPolicy attempt = algorithm2(d, sel, q, r, k0, opts);
                    const auto stop = std::chrono::steady_clock::now();
                    best = std::min(best, std::chrono::duration<double>(stop - start).count());
                    if (!kept) kept = std::move(attempt);
                }
                const LearnedPolicy& policy = *kept;
                run.row.wall_time = best;
                run.row.k_error = (policy.K - truth.K).norm();
                run.row.k_rel_error = run.row.k_error / k_norm;
                run.row.success = true;
                run.gains = policy.trace.gains();
            } catch (const Error& e) {
                run.row.success = false;
                std::ostringstream msg;
                msg << e.what() << " [cond(Z_eta)=" << sel.condition << "]";
                run.row.message = msg.str();
            }
        }
    } catch (const Error& e) {
        for (auto& run : runs) {
            run.row.success = false;
            run.row.message = std::string("setup failed: ") + e.what();
        }
    }

    if (runs[0].row.success && runs[1].row.success &&
        runs[0].gains.size() == runs[1].gains.size()) {
        double diff = 0.0;
        for (std::size_t i = 0; i < runs[0].gains.size(); ++i) {
            diff = std::max(diff, (runs[0].gains[i] - runs[1].gains[i]).norm());
        }
        runs[0].row.trace_diff = diff;
        runs[1].row.trace_diff = diff;
    }
    return {runs[0].row, runs[1].row};
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    BenchReport report;
    report.config = cfg;

    std::vector<std::pair<Eigen::Index, int>> jobs;
    for (auto n : cfg.dims) {
        for (int t = 0; t < cfg.trials; ++t) jobs.emplace_back(n, t);
    }
    std::vector<std::vector<BenchRow>> results(jobs.size());

    // One untimed trial warms allocators and caches before the measured sweep.
    run_trial(cfg, cfg.dims.front(), -1);

    const int workers = cfg.sequential_timing ? 1 : cfg.workers;
    if (workers <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            results[j] = run_trial(cfg, jobs[j].first, jobs[j].second);
        }
    } else {
        // Each job writes only its own slot; rows are assembled in job order afterwards.
        for (std::size_t base = 0; base < jobs.size(); base += static_cast<std::size_t>(workers)) {
            std::vector<std::future<void>> batch;
            for (std::size_t j = base; j < std::min(jobs.size(), base + workers); ++j) {
                batch.push_back(std::async(std::launch::async, [&, j] {
                    results[j] = run_trial(cfg, jobs[j].first, jobs[j].second);
                }));
            }
            for (auto& f : batch) f.get();
        }
    }
    for (auto& rows : results) {
        for (auto& row : rows) report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<BenchAggregate> BenchReport::aggregate() const {
    std::map<std::pair<Eigen::Index, int>, BenchAggregate> acc;
    for (const auto& row : rows) {
        auto& agg = acc[{row.n, static_cast<int>(row.method)}];
        agg.n = row.n;
        agg.method = row.method;
        ++agg.runs;
        if (row.success) {
            ++agg.successes;
            agg.mean_time += row.wall_time;
            if (row.k_rel_error <= 1e-6) ++agg.accurate;
        }
    }
    std::vector<BenchAggregate> out;
    for (auto& [key, agg] : acc) {
        if (agg.successes > 0) agg.mean_time /= agg.successes;
        out.push_back(agg);
    }
    return out;
}

double BenchReport::time_ratio(Eigen::Index n) const {
    double syl = std::numeric_limits<double>::quiet_NaN();
    double kro = std::numeric_limits<double>::quiet_NaN();
    for (const auto& agg : aggregate()) {
        if (agg.n != n) continue;
        (agg.method == SylvesterMethod::Iterative ? syl : kro) = agg.mean_time;
    }
    return kro / syl;
}

void write_report_csv(const std::filesystem::path& path, const BenchReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out << "n,trial,method,wall_time_s,k_error,k_rel_error,cond_zeta,trace_diff,success,message\n";
    out << std::setprecision(10);
    for (const auto& row : report.rows) {
        std::string msg = row.message;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << row.n << ',' << row.trial << ',' << to_string(row.method) << ',' << row.wall_time
            << ',' << row.k_error << ',' << row.k_rel_error << ',' << row.cond_zeta << ','
            << row.trace_diff << ',' << (row.success ? 1 : 0) << ",\"" << msg << "\"\n";
    }
}

std::string render_table(const BenchReport& report) {
    struct Line {
        double syl_time = 0.0;
        double kro_time = 0.0;
        std::string syl_ok;
        std::string kro_ok;
    };
    std::map<Eigen::Index, Line> lines;
    for (const auto& agg : report.aggregate()) {
        auto& line = lines[agg.n];
        const std::string ok = std::to_string(agg.accurate) + "/" + std::to_string(agg.runs);
        if (agg.method == SylvesterMethod::Iterative) {
            line.syl_time = agg.mean_time;
            line.syl_ok = ok;
        } else {
            line.kro_time = agg.mean_time;
            line.kro_ok = ok;
        }
    }
    const char* rule =
        "+-------------+--------------+--------------+---------+-----------+-----------+\n";
    std::ostringstream s;
    s << "Average time for " << report.config.iterations << " iterations (sec), "
      << report.config.trials << " trials per dimension; ok = runs with relative gain error <= 1e-6\n";
    s << rule;
    s << "| Dimension n |          SYL |          KRO | KRO/SYL |    SYL ok |    KRO ok |\n";
    s << rule;
    for (const auto& [n, line] : lines) {
        s << "| " << std::setw(11) << n << " | " << std::setw(12) << std::scientific
          << std::setprecision(4) << line.syl_time << " | " << std::setw(12) << line.kro_time
          << " | " << std::setw(7) << std::fixed << std::setprecision(2)
          << line.kro_time / line.syl_time << " | " << std::setw(9) << line.syl_ok << " | "
          << std::setw(9) << line.kro_ok << " |\n";
        s << std::defaultfloat;
    }
    s << rule;
    return s.str();
}

}  // namespace ctlqr
