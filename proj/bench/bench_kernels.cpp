#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "kresling/equilibrium.hpp"
#include "kresling/parallel.hpp"

using namespace kresling;

namespace {

OrthosisDesign bench_design() {
    MeasurementSet m;
    const double c[6] = {258.2, 258.2, 213.5, 175.6, 175.6, 175.6};
    const double h[5] = {20, 29, 24, 26, 26};
    for (int i = 0; i < kSections; ++i) m.sections[i] = {c[i], c[i + 1], h[i]};
    return design_orthosis(m);
}

const ElasticModel& bench_model() {
    static const ElasticModel model = build_elastic_model(bench_design(), 1.0, 100.0);
    return model;
}

std::vector<Eigen::VectorXd> random_states(std::size_t n) {
    const Eigen::VectorXd x0 = neutral_parameters(bench_model());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::VectorXd> out(n, x0);
    for (auto& x : out) {
        for (int j = 0; j < x.size(); j += kUnitDofs) {
            x[j] *= 1.0 + 0.2 * u(rng);
            x[j + 1] += 0.1 * u(rng);
            x[j + 2] = 0.2 * u(rng);
            x[j + 3] = 0.2 * u(rng);
        }
    }
    return out;
}

void BM_ObjectiveBatchSerial(benchmark::State& state) {
    const auto states = random_states(static_cast<std::size_t>(state.range(0)));
    TendonCommand cmd;
    cmd.contraction[0] = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_objective_batch_serial(bench_model(), states, cmd, 1e3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ObjectiveBatchParallel(benchmark::State& state) {
    const auto states = random_states(static_cast<std::size_t>(state.range(0)));
    TendonCommand cmd;
    cmd.contraction[0] = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_objective_batch_parallel(bench_model(), states, cmd, 1e3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_WorkspaceSerial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(workspace_sweeps_serial(bench_model(), static_cast<int>(state.range(0)), 0.1));
    }
}

void BM_WorkspaceParallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(workspace_sweeps_parallel(bench_model(), static_cast<int>(state.range(0)), 0.1));
    }
}

}  // namespace

BENCHMARK(BM_ObjectiveBatchSerial)->Arg(1024)->Arg(16384);
BENCHMARK(BM_ObjectiveBatchParallel)->Arg(1024)->Arg(16384);
BENCHMARK(BM_WorkspaceSerial)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WorkspaceParallel)->Arg(15)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
