// Microbenchmarks for the hot path of a batch: kernel assembly, the row
// solve, the column rewrite and a full scenario evaluation. Sizes mirror a
// mid-size table (300 nodes) rather than the full OECD grid so a run stays
// under a minute.

#include "vulnet/kernel.hpp"
#include "vulnet/restriction.hpp"
#include "vulnet/runner.hpp"
#include "vulnet/synthetic.hpp"

#include <benchmark/benchmark.h>

namespace {

struct BenchState {
    vulnet::SyntheticEconomy economy;
    vulnet::FlowMatrix matrix;
    vulnet::SizeWeights sizes;
    vulnet::AllocationMatrix allocation;
    vulnet::LeakageRates leakage;
    vulnet::PropagationKernel kernel;
    vulnet::SelectorSet sel;

    BenchState() {
        vulnet::SyntheticParams params;
        params.seed = 27;
        params.countries = 20;
        params.sectors = 15;
        params.density = 0.1;
        economy = vulnet::generate_economy(params);
        const auto& index = economy.table.index();
        matrix = vulnet::build_flow_matrix(economy.table, index);
        sizes = vulnet::compute_sizes(matrix);
        allocation = vulnet::compute_allocation(matrix, sizes);
        leakage = vulnet::compute_leakage(matrix);
        kernel = vulnet::build_kernel(allocation, leakage);
        vulnet::validate_kernel(kernel);

        vulnet::RestrictionSpec spec;
        spec.target_country = index.country_code(0);
        spec.source_country = index.country_code(1);
        sel = vulnet::make_selectors(spec, index);
    }
};

BenchState& state() {
    static BenchState s;
    return s;
}

void BM_kernel_build(benchmark::State& bench) {
    auto& s = state();
    for (auto _ : bench) {
        auto kernel = vulnet::build_kernel(s.allocation, s.leakage);
        vulnet::validate_kernel(kernel);
        benchmark::DoNotOptimize(kernel.colsum_bound);
    }
}
BENCHMARK(BM_kernel_build);

void BM_row_solve(benchmark::State& bench) {
    auto& s = state();
    for (auto _ : bench) {
        Eigen::VectorXd v = vulnet::leontief_row_solve(s.kernel, s.sel.mu);
        benchmark::DoNotOptimize(v.sum());
    }
}
BENCHMARK(BM_row_solve);

void BM_row_solve_warm(benchmark::State& bench) {
    auto& s = state();
    const Eigen::VectorXd guess = vulnet::leontief_row_solve(s.kernel, s.sel.mu);
    vulnet::SolveOptions options;
    options.initial_guess = &guess;
    for (auto _ : bench) {
        Eigen::VectorXd v = vulnet::leontief_row_solve(s.kernel, s.sel.mu, options);
        benchmark::DoNotOptimize(v.sum());
    }
}
BENCHMARK(BM_row_solve_warm);

void BM_restriction_apply(benchmark::State& bench) {
    auto& s = state();
    for (auto _ : bench) {
        auto delta = vulnet::apply_restriction(s.allocation, s.sel);
        benchmark::DoNotOptimize(delta.skipped_inactive);
    }
}
BENCHMARK(BM_restriction_apply);

void BM_restriction_materialize(benchmark::State& bench) {
    auto& s = state();
    const auto delta = vulnet::apply_restriction(s.allocation, s.sel);
    for (auto _ : bench) {
        auto rebuilt = delta.materialize();
        benchmark::DoNotOptimize(rebuilt.shares.nonZeros());
    }
}
BENCHMARK(BM_restriction_materialize);

void BM_single_scenario(benchmark::State& bench) {
    auto& s = state();
    const auto& index = s.economy.table.index();
    auto context = vulnet::make_scenario_context(index, s.allocation, s.leakage, s.sizes,
                                                 index.country_code(0));
    vulnet::RestrictionSpec spec;
    spec.target_country = index.country_code(0);
    spec.source_country = index.country_code(1);
    for (auto _ : bench) {
        auto result = vulnet::run_single_scenario(context, spec);
        benchmark::DoNotOptimize(result.gamma);
    }
}
BENCHMARK(BM_single_scenario);

} // namespace

BENCHMARK_MAIN();
