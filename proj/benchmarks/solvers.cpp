#include "ctlqr/bench.hpp"
#include "ctlqr/data_pipeline.hpp"
#include "ctlqr/excitation.hpp"
#include "ctlqr/learner.hpp"
#include "ctlqr/matrix_equations.hpp"
#include "ctlqr/simulator.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ctlqr;

// Same recipe as the comparison table: a random stable plant sampled with the
// default excitation, one fixed instance per dimension.
struct Instance {
    DataMatrices data;
    ColumnSelection selection;
    Matrix q;
    Matrix r;
    Matrix k0;
};

Instance make_instance(Eigen::Index n) {
    const BenchConfig cfg;
    const std::uint64_t seed = trial_seed(cfg.seed, n, 0);
    const LtiSystem sys = random_stable_system(n, cfg.m, seed);
    const PeSequence pe = gen_pe_sequence(cfg.m, n + 1, cfg.samples_for(n), seed ^ 0xa5a5a5a5ULL);
    const Trajectory traj = simulate_pcpe(sys, PcpeInput{pe.mu, cfg.T, cfg.dt}, Vector::Zero(n));
    Instance inst;
    inst.data = build_data_matrices(traj, cfg.T, Quadrature::Trapezoid);
    inst.selection = select_columns(inst.data);
    inst.q = cfg.q_weight * Matrix::Identity(n, n);
    inst.r = cfg.r_weight * Matrix::Identity(cfg.m, cfg.m);
    inst.k0 = Matrix::Zero(cfg.m, n);
    return inst;
}

void policy_iteration(benchmark::State& state, SylvesterMethod method) {
    const Instance inst = make_instance(state.range(0));
    LearnerOptions opts;
    opts.method = method;
    opts.max_iters = 10;
    opts.stop_on_convergence = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(algorithm2(inst.data, inst.selection, inst.q, inst.r, inst.k0, opts));
    }
}

void single_solve(benchmark::State& state, SylvesterMethod method) {
    const Instance inst = make_instance(state.range(0));
    const ColumnSelection img = congruence_image(inst.selection);
    const IterationMatrices it = build_iteration_matrices(img, inst.k0, inst.q, inst.r);
    const SylvesterTransposeProblem prob{it.Yminus, it.Yplus, it.Qi};
    SylvesterOptions opts;
    opts.tol = 1e-14;
    for (auto _ : state) {
        if (method == SylvesterMethod::Iterative) {
            benchmark::DoNotOptimize(solve_sylvester_transpose(prob, img.Xeta, opts));
        } else {
            benchmark::DoNotOptimize(solve_sylvester_transpose_kron(prob, img.Xeta));
        }
    }
}

void simulate(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const BenchConfig cfg;
    const LtiSystem sys = random_stable_system(n, cfg.m, 1);
    const PeSequence pe = gen_pe_sequence(cfg.m, n + 1, cfg.samples_for(n), 2);
    const PcpeInput input{pe.mu, cfg.T, cfg.dt};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_pcpe(sys, input, Vector::Zero(n)));
    }
}

void dims(benchmark::internal::Benchmark* b) {
    for (int n : {2, 3, 5, 7}) b->Arg(n);
    b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK_CAPTURE(policy_iteration, SYL, SylvesterMethod::Iterative)->Apply(dims);
BENCHMARK_CAPTURE(policy_iteration, KRO, SylvesterMethod::Kronecker)->Apply(dims);
BENCHMARK_CAPTURE(single_solve, SYL, SylvesterMethod::Iterative)->Apply(dims);
BENCHMARK_CAPTURE(single_solve, KRO, SylvesterMethod::Kronecker)->Apply(dims);
BENCHMARK(simulate)->Apply(dims);
BENCHMARK_MAIN();
