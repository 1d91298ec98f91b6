#include "cli.hpp"

#include "ctlqr/bench.hpp"
#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/errors.hpp"
#include "ctlqr/excitation.hpp"
#include "ctlqr/init_gain.hpp"
#include "ctlqr/kleinman.hpp"
#include "ctlqr/learner.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/matrix_io.hpp"
#include "ctlqr/simulator.hpp"
#include "ctlqr/system.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef CTLQR_VERSION
#define CTLQR_VERSION "unknown"
#endif

namespace ctlqr::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Globals {
    std::uint64_t seed = 2024;
    std::string config;
    std::string out_dir = ".";
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

// Everything needed to replay a run: the command line, the resolved settings,
// and the files read and written.
class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& args, const Globals& g) {
        doc_["command"] = std::move(command);
        doc_["argv"] = args;
        doc_["config"] = g.config.empty() ? json(nullptr) : json(g.config);
        doc_["seed"] = g.seed;
        doc_["version"] = CTLQR_VERSION;
        doc_["timestamp"] = utc_timestamp();
        doc_["settings"] = json::object();
        doc_["inputs"] = json::object();
        doc_["outputs"] = json::object();
    }
    json& settings() { return doc_["settings"]; }
    void input(const std::string& key, const fs::path& p) { doc_["inputs"][key] = p.string(); }
    void output(const std::string& key, const fs::path& p) { doc_["outputs"][key] = p.string(); }
    void result(const std::string& key, json value) { doc_["result"][key] = std::move(value); }

    void write(const fs::path& dir, int exit_code) {
        doc_["exit_code"] = exit_code;
        std::ofstream out(dir / "manifest.json");
        if (!out) throw ConfigError("cannot write " + (dir / "manifest.json").string());
        out << std::setw(2) << doc_ << '\n';
    }

private:
    json doc_;
};

fs::path prepare_out_dir(const Globals& g) {
    const fs::path dir(g.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

Matrix weight(const std::string& file, double scale, Eigen::Index dim) {
    if (!file.empty()) return load_matrix(file);
    return scale * Matrix::Identity(dim, dim);
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Spectrum& s) {
    json out = json::array();
    for (const auto& z : s.sorted()) out.push_back({z.real(), z.imag()});
    return out;
}

Quadrature parse_quadrature(const std::string& name) {
    static const std::map<std::string, Quadrature> names{
        {"auto", Quadrature::Auto}, {"exact", Quadrature::Exact}, {"trapezoid", Quadrature::Trapezoid}};
    return names.at(name);
}

SylvesterMethod parse_method(const std::string& name) {
    return name == "kro" ? SylvesterMethod::Kronecker : SylvesterMethod::Iterative;
}

// ---------------------------------------------------------------- collect

struct CollectArgs {
    std::string system;
    Eigen::Index n = 2;
    Eigen::Index m = 1;
    bool unstable = false;
    double T = 0.2;
    double dt = 1e-4;
    Eigen::Index length = 0;
    Eigen::Index order = 0;
    std::string quadrature = "auto";
};

int cmd_collect(const CollectArgs& a, const Globals& g, Manifest& man, std::ostream& out) {
    const fs::path dir = prepare_out_dir(g);
    LtiSystem sys;
    if (!a.system.empty()) {
        sys = load_system(a.system);
        man.input("system", a.system);
    } else if (a.unstable) {
        sys = random_controllable_system(a.n, a.m, g.seed, 0.1, 1.0);
    } else {
        sys = random_stable_system(a.n, a.m, g.seed);
    }
    const auto n = sys.n();
    const auto m = sys.m();
    const Eigen::Index order = a.order > 0 ? a.order : n + 1;
    const Eigen::Index length = a.length > 0 ? a.length : (n + 1) * m + n;
    man.settings() = {{"n", n}, {"m", m}, {"T", a.T}, {"dt", a.dt}, {"length", length},
                      {"order", order}, {"quadrature", a.quadrature},
                      {"generated", a.system.empty()}, {"unstable", a.unstable}};

    if (!check_nonpathological(eig(sys.A()), a.T)) {
        throw DataError("collect: sampling period T = " + std::to_string(a.T) +
                        " is pathological for this plant");
    }
    if (length < min_pe_length(m, order)) {
        throw DataError("collect: N = " + std::to_string(length) +
                        " samples cannot be persistently exciting of order " +
                        std::to_string(order) + " (need " +
                        std::to_string(min_pe_length(m, order)) + ")");
    }
    const PeSequence pe = gen_pe_sequence(m, order, length, g.seed + 1);
    const Trajectory traj = simulate_pcpe(sys, PcpeInput{pe.mu, a.T, a.dt}, Vector::Zero(n));
    DataMatrices d = build_data_matrices(traj, a.T, parse_quadrature(a.quadrature));
    d.seed = g.seed;
    if (!verify_rank(d)) {
        throw DataError("collect: rank([X; U]) < n + m on the collected data");
    }
    const ColumnSelection sel = select_columns(d);

    save_system(dir / "system.txt", sys);
    save_sequence(dir / "sequence.txt", pe.mu);
    write_trajectory_csv(dir / "trajectory.csv", traj);
    save_bundle(dir / "bundle", d);
    man.output("system", dir / "system.txt");
    man.output("sequence", dir / "sequence.txt");
    man.output("trajectory", dir / "trajectory.csv");
    man.output("bundle", dir / "bundle");
    man.result("N", d.N());
    man.result("cond_zeta", sel.condition);
    man.result("quadrature", d.quadrature);

    out << "collected n=" << n << " m=" << m << " N=" << d.N() << " (" << d.quadrature
        << " integrals), rank ok, cond(Z_eta) = " << sel.condition << '\n'
        << "bundle: " << (dir / "bundle").string() << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------- learn

struct LearnArgs {
    std::string bundle;
    std::string k0;
    std::string q_file;
    std::string r_file;
    double q_weight = 1.0;
    double r_weight = 1.0;
    double eps = 1e-10;
    int max_iters = 50;
    bool fixed = false;
    std::string method = "syl";
    std::string audit;
};

int cmd_learn(const LearnArgs& a, const Globals& g, Manifest& man, std::ostream& out) {
    const fs::path dir = prepare_out_dir(g);
    const DataMatrices d = load_bundle(a.bundle);
    man.input("bundle", a.bundle);
    const Matrix q = weight(a.q_file, a.q_weight, d.n());
    const Matrix r = weight(a.r_file, a.r_weight, d.m());
    Matrix k0 = Matrix::Zero(d.m(), d.n());
    if (!a.k0.empty()) {
        k0 = load_matrix(a.k0);
        man.input("k0", a.k0);
    }
    LearnerOptions opts;
    opts.eps = a.eps;
    opts.max_iters = a.max_iters;
    opts.stop_on_convergence = !a.fixed;
    opts.method = parse_method(a.method);
    if (!a.audit.empty()) {
        opts.audit = load_system(a.audit);
        man.input("audit", a.audit);
    }
    man.settings() = {{"eps", a.eps}, {"max_iters", a.max_iters}, {"fixed_iterations", a.fixed},
                      {"method", to_string(opts.method)}, {"Q", to_json(q)}, {"R", to_json(r)}};

    const LearnedPolicy pol = algorithm2(d, q, r, k0, opts);
    save_matrix(dir / "K.txt", pol.K);
    save_matrix(dir / "P.txt", pol.P);
    write_trace_csv(dir / "trace.csv", pol.trace);
    man.output("K", dir / "K.txt");
    man.output("P", dir / "P.txt");
    man.output("trace", dir / "trace.csv");
    man.result("iterations", pol.trace.records.size());
    man.result("converged", pol.trace.converged);
    man.result("final_gap", pol.trace.final_gap);
    man.result("cond_zeta", pol.selection.condition);

    out << std::setprecision(10) << "iterations: " << pol.trace.records.size()
        << ", final gap " << pol.trace.final_gap << ", cond(Z_eta) = " << pol.selection.condition
        << "\nK =\n" << pol.K << "\nP =\n" << pol.P << '\n';
    if (!a.fixed && !pol.trace.converged) {
        out << "not converged: gap " << pol.trace.final_gap << " > eps " << a.eps << " after "
            << a.max_iters << " iterations\n";
        return kConvergence;
    }
    return kSuccess;
}

// ---------------------------------------------------------------- init-gain

struct InitGainArgs {
    std::string bundle;
    std::string poles;
};

int cmd_init_gain(const InitGainArgs& a, const Globals& g, Manifest& man, std::ostream& out) {
    const fs::path dir = prepare_out_dir(g);
    const DataMatrices d = load_bundle(a.bundle);
    man.input("bundle", a.bundle);
    man.settings() = {{"poles", a.poles.empty() ? json(nullptr) : json(a.poles)}};
    const PoleSpec spec = a.poles.empty() ? PoleSpec{} : parse_pole_spec(a.poles);
    const InitialGain gain = data_stabilizing_gain(d, spec);

    save_matrix(dir / "K0.txt", gain.K0);
    json report{{"eigenvalues", to_json(gain.closed_loop_spectrum)},
                {"max_real", gain.closed_loop_spectrum.max_real()},
                {"hurwitz", gain.closed_loop_spectrum.is_hurwitz()},
                {"cond_X", gain.cond_X},
                {"cond_Z", gain.cond_Z}};
    std::ofstream(dir / "spectrum.json") << std::setw(2) << report << '\n';
    man.output("K0", dir / "K0.txt");
    man.output("spectrum", dir / "spectrum.json");
    man.result("max_real", gain.closed_loop_spectrum.max_real());

    out << std::setprecision(10) << "K0 =\n" << gain.K0 << "\ndata closed-loop eigenvalues:";
    for (const auto& z : gain.closed_loop_spectrum.sorted()) out << ' ' << z;
    out << "\ncond(X) = " << gain.cond_X << ", cond([X; U]) = " << gain.cond_Z << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    BenchConfig cfg;
    bool smoke = false;
    bool parallel = false;
};

int cmd_bench(BenchArgs a, const Globals& g, Manifest& man, std::ostream& out) {
    const fs::path dir = prepare_out_dir(g);
    BenchConfig& cfg = a.cfg;
    cfg.seed = g.seed;
    if (a.smoke) cfg.trials = 10;
    if (a.parallel) cfg.sequential_timing = false;
    cfg.validate();
    man.settings() = {{"dims", cfg.dims}, {"m", cfg.m}, {"q_weight", cfg.q_weight},
                      {"r_weight", cfg.r_weight}, {"T", cfg.T}, {"dt", cfg.dt},
                      {"trials", cfg.trials}, {"iterations", cfg.iterations}, {"repeats", cfg.repeats},
                      {"workers", cfg.workers}, {"sequential_timing", cfg.sequential_timing}};

    const BenchReport report = run_benchmark(cfg);
    const std::string table = render_table(report);
    write_report_csv(dir / "bench.csv", report);
    std::ofstream(dir / "bench_table.txt") << table;
    man.output("report", dir / "bench.csv");
    man.output("table", dir / "bench_table.txt");
    json ratios = json::object();
    for (auto n : cfg.dims) ratios[std::to_string(n)] = report.time_ratio(n);
    man.result("kro_over_syl", ratios);
    out << table;
    return kSuccess;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string bundle;
    std::string system;
    std::string k0;
    double q_weight = 1.0;
    double r_weight = 1.0;
    int iterations = 10;
};

struct CheckResult {
    std::string name;
    bool pass;
    int code;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(3) << v;
    return s.str();
}

int error_code(const std::exception& e);

int cmd_verify(const VerifyArgs& a, const Globals& g, Manifest& man, std::ostream& out) {
    const fs::path dir = prepare_out_dir(g);
    const DataMatrices d = load_bundle(a.bundle);
    man.input("bundle", a.bundle);
    std::optional<LtiSystem> sys;
    if (!a.system.empty()) {
        sys = load_system(a.system);
        man.input("system", a.system);
        if (sys->n() != d.n() || sys->m() != d.m()) {
            throw ConfigError("verify: system dimensions do not match the bundle");
        }
    }
    const auto n = d.n();
    const auto m = d.m();
    const Matrix q = a.q_weight * Matrix::Identity(n, n);
    const Matrix r = a.r_weight * Matrix::Identity(m, m);
    Matrix k0 = Matrix::Zero(m, n);
    if (!a.k0.empty()) {
        k0 = load_matrix(a.k0);
        man.input("k0", a.k0);
    }
    man.settings() = {{"q_weight", a.q_weight}, {"r_weight", a.r_weight},
                      {"iterations", a.iterations}};
    const bool exact = d.quadrature == "exact";

    std::vector<CheckResult> checks;
    auto add = [&](std::string name, bool pass, int code, std::string detail) {
        checks.push_back({std::move(name), pass, code, std::move(detail)});
    };

    add("excitation length", d.N() >= (n + 1) * m + n, kData,
        "N = " + std::to_string(d.N()) + ", need " + std::to_string((n + 1) * m + n));
    const bool rank_ok = verify_rank(d);
    add("rank", rank_ok, kData, rank_ok ? "rank([X; U]) = n + m" : "rank([X; U]) < n + m");
    if (rank_ok) {
        const ColumnSelection sel = select_columns(d);
        add("column selection", std::isfinite(sel.condition), kData,
            "cond(Z_eta) = " + num(sel.condition));
    }
    if (sys) {
        add("sampling period", check_nonpathological(eig(sys->A()), d.T), kData,
            "T = " + num(d.T));
        const double scale = sys->A().norm() * d.X.norm() + sys->B().norm() * d.U.norm();
        const double mismatch = (d.Xtilde - sys->A() * d.X - sys->B() * d.U).norm() / scale;
        const double tol = exact ? 1e-9 : 1e-4;
        add("model identity", mismatch <= tol, kData,
            "relative |Xtilde - A X - B U| = " + num(mismatch) + " (" + d.quadrature + ")");
        add("initial gain", sys->stability_margin(k0) > 0.0, kStability,
            "stability margin " + num(sys->stability_margin(k0)));
    }

    if (rank_ok && (!sys || sys->stability_margin(k0) > 0.0)) {
        try {
            LearnerOptions opts;
            opts.max_iters = a.iterations;
            opts.stop_on_convergence = false;
            opts.audit = sys;
            const LearnedPolicy pol = algorithm2(d, q, r, k0, opts);
            const double min_p = min_symmetric_eigenvalue(pol.P);
            add("policy iteration", min_p > 0.0, kStability,
                std::to_string(pol.trace.records.size()) + " iterations, min eig P = " + num(min_p));
            if (sys) {
                const auto& recs = pol.trace.records;
                double margin = std::numeric_limits<double>::infinity();
                double chain = 0.0;
                for (std::size_t i = 0; i < recs.size(); ++i) {
                    margin = std::min(margin, sys->stability_margin(recs[i].K));
                    if (i > 0) {
                        const double slack = 1e-8 * std::max(1.0, recs[i].P.norm());
                        chain = std::min(chain, min_symmetric_eigenvalue(recs[i - 1].P - recs[i].P) / slack);
                    }
                }
                add("stabilizing iterates", margin > 0.0, kStability, "min margin " + num(margin));
                add("monotone value chain", chain >= -1.0, kStability,
                    "worst min-eig(P_i - P_i+1) in units of 1e-8 |P|: " + num(chain));

                const AreSolution star = solve_are(*sys, q, r, k0);
                const double k_norm = std::max(1.0, star.K.norm());
                if (exact) {
                    IterationOptions kopts;
                    kopts.eps = 0.0;
                    kopts.max_iters = a.iterations;
                    const auto model = kleinman_iterate(*sys, q, r, k0, kopts).gains();
                    const auto learned = pol.trace.gains();
                    double gap = 0.0;
                    for (std::size_t i = 0; i < learned.size(); ++i) {
                        gap = std::max(gap, (learned[i] - model[std::min(i, model.size() - 1)]).norm());
                    }
                    add("Kleinman agreement", gap <= 1e-8 * k_norm, kConvergence,
                        "max per-iteration gain gap " + num(gap));
                } else {
                    const double rel = (pol.K - star.K).norm() / k_norm;
                    add("optimal gain", rel <= 1e-4, kConvergence,
                        "relative |K - K*| = " + num(rel));
                }
            }
        } catch (const Error& e) {
            add("policy iteration", false, error_code(e), e.what());
        }
    }

    int code = kSuccess;
    json report = json::array();
    for (const auto& c : checks) {
        out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(22) << c.name << c.detail
            << '\n';
        report.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass && code == kSuccess) code = c.code;
    }
    std::ofstream(dir / "verify.json") << std::setw(2) << report << '\n';
    man.output("report", dir / "verify.json");
    man.result("failed", std::count_if(checks.begin(), checks.end(),
                                       [](const CheckResult& c) { return !c.pass; }));
    return code;
}

// ---------------------------------------------------------------- dispatch

int error_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e)) {
        return kUsage;
    }
    if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const GenerationError*>(&e) ||
        dynamic_cast<const ConsistencyError*>(&e)) {
        return kData;
    }
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const NumericalError*>(&e)) {
        return kConvergence;
    }
    if (dynamic_cast<const StabilityError*>(&e) || dynamic_cast<const SingularityError*>(&e) ||
        dynamic_cast<const StabilizationError*>(&e)) {
        return kStability;
    }
    return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Data-driven policy iteration for continuous-time LQR", "ctlqr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CTLQR_VERSION));

    Globals g;
    app.add_option("--seed", g.seed, "Seed for system generation, excitation and benchmarks")
        ->capture_default_str();
    app.set_config("--config", "", "TOML/INI file: top-level keys set global options, "
                                   "[collect], [learn], ... sections set subcommand options");
    app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();

    const std::vector<std::string> quadratures{"auto", "exact", "trapezoid"};
    const std::vector<std::string> methods{"syl", "kro"};

    CollectArgs ca;
    auto* collect = app.add_subcommand("collect", "Simulate a PCPE experiment and build a data bundle");
    collect->add_option("--system", ca.system, "System file (A block then B block)")
        ->check(CLI::ExistingFile);
    collect->add_option("--n", ca.n, "State dimension of a generated plant")->capture_default_str()
        ->check(CLI::PositiveNumber);
    collect->add_option("--m", ca.m, "Input dimension of a generated plant")->capture_default_str()
        ->check(CLI::PositiveNumber);
    collect->add_flag("--unstable", ca.unstable, "Generate an open-loop unstable plant");
    collect->add_option("--T", ca.T, "Hold interval length")->capture_default_str();
    collect->add_option("--dt", ca.dt, "Simulation sample step")->capture_default_str();
    collect->add_option("--length", ca.length, "Number of hold intervals N (default (n+1)m+n)");
    collect->add_option("--order", ca.order, "Excitation order (default n+1)");
    collect->add_option("--quadrature", ca.quadrature, "Integral evaluation")
        ->check(CLI::IsMember(quadratures))->capture_default_str();

    LearnArgs la;
    auto* learn = app.add_subcommand("learn", "Run the data-based policy iteration on a bundle");
    learn->add_option("--bundle", la.bundle, "Bundle directory")->required();
    learn->add_option("--k0", la.k0, "Initial stabilizing gain file (default zero)")
        ->check(CLI::ExistingFile);
    learn->add_option("--q", la.q_file, "State weight file")->check(CLI::ExistingFile);
    learn->add_option("--r", la.r_file, "Input weight file")->check(CLI::ExistingFile);
    learn->add_option("--q-weight", la.q_weight, "Q = q_weight I when --q is absent")->capture_default_str();
    learn->add_option("--r-weight", la.r_weight, "R = r_weight I when --r is absent")->capture_default_str();
    learn->add_option("--eps", la.eps, "Stop once |K_i+1 - K_i| <= eps")->capture_default_str();
    learn->add_option("--max-iters", la.max_iters, "Iteration budget")->capture_default_str()
        ->check(CLI::PositiveNumber);
    learn->add_flag("--fixed-iterations", la.fixed, "Run exactly --max-iters iterations");
    learn->add_option("--method", la.method, "Sylvester-transpose solver")
        ->check(CLI::IsMember(methods))->capture_default_str();
    learn->add_option("--audit", la.audit, "System file used only to record stability margins")
        ->check(CLI::ExistingFile);

    InitGainArgs ia;
    auto* init = app.add_subcommand("init-gain", "Compute a stabilizing K0 from a bundle");
    init->add_option("--bundle", ia.bundle, "Bundle directory")->required();
    init->add_option("--poles", ia.poles, "Target poles, e.g. \"-1, -2+1j, -2-1j\"");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Time SYL against KRO on random stable plants");
    bench->add_option("--dims", ba.cfg.dims, "State dimensions")->delimiter(',')->capture_default_str();
    bench->add_option("--m", ba.cfg.m, "Input dimension")->capture_default_str();
    bench->add_option("--q-weight", ba.cfg.q_weight, "Q = q_weight I")->capture_default_str();
    bench->add_option("--r-weight", ba.cfg.r_weight, "R = r_weight I")->capture_default_str();
    bench->add_option("--T", ba.cfg.T, "Hold interval length")->capture_default_str();
    bench->add_option("--dt", ba.cfg.dt, "Simulation sample step")->capture_default_str();
    bench->add_option("--trials", ba.cfg.trials, "Trials per dimension")->capture_default_str();
    bench->add_option("--iterations", ba.cfg.iterations, "Policy iterations per run")->capture_default_str();
    bench->add_option("--repeats", ba.cfg.repeats, "Timed repeats per run; the fastest is kept")->capture_default_str();
    bench->add_option("--workers", ba.cfg.workers, "Worker threads with --parallel")->capture_default_str();
    bench->add_flag("--parallel", ba.parallel, "Run trials concurrently (timings become noisier)");
    bench->add_flag("--smoke", ba.smoke, "Reduced run with 10 trials per dimension");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Check a bundle against the method's invariants");
    verify->add_option("--bundle", va.bundle, "Bundle directory")->required();
    verify->add_option("--system", va.system, "Ground-truth system file for model audits")
        ->check(CLI::ExistingFile);
    verify->add_option("--k0", va.k0, "Initial gain file (default zero)")->check(CLI::ExistingFile);
    verify->add_option("--q-weight", va.q_weight, "Q = q_weight I")->capture_default_str();
    verify->add_option("--r-weight", va.r_weight, "R = r_weight I")->capture_default_str();
    verify->add_option("--iterations", va.iterations, "Policy iterations to run")->capture_default_str()
        ->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    if (const CLI::Option* cfg = app.get_config_ptr(); cfg != nullptr && cfg->count() > 0) {
        g.config = cfg->as<std::string>();
    }
    CLI::App* sub = app.get_subcommands().front();
    Manifest man(sub->get_name(), args, g);
    int code = kFailure;
    try {
        if (sub == collect) code = cmd_collect(ca, g, man, out);
        else if (sub == learn) code = cmd_learn(la, g, man, out);
        else if (sub == init) code = cmd_init_gain(ia, g, man, out);
        else if (sub == bench) code = cmd_bench(ba, g, man, out);
        else code = cmd_verify(va, g, man, out);
    } catch (const std::exception& e) {
        code = error_code(e);
        err << "ctlqr " << sub->get_name() << ": " << e.what() << '\n';
        man.result("error", e.what());
    }
    try {
        man.write(prepare_out_dir(g), code);
    } catch (const Error& e) {
        err << "ctlqr: " << e.what() << '\n';
        if (code == kSuccess) code = kUsage;
    }
    return code;
}

}  // namespace ctlqr::cli
