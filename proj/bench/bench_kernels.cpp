// Serial reference vs OpenMP kernels: kernel path simulation and feedback replication.
#include "rqopt/portfolio.hpp"
#include "rqopt/simulate.hpp"
#include "rqopt/vi_solver.hpp"

#include <benchmark/benchmark.h>

using namespace rqopt;

namespace {

MarketSpec reference()
{
    Eigen::VectorXd th(1);
    th << 0.25;
    Eigen::MatrixXd sg(1, 1);
    sg << 0.2;
    return MarketSpec(1.0, {{1.0, 0.03, th, sg}});
}

const TerminalMap& two_point_map()
{
    static const TerminalMap map = [] {
        auto law = kernel_law(reference());
        Grid g(1024);
        auto sol = calibrate(1.0, ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g), UtilityModel::exponential(1.0),
                             kernel_quantile(law, g));
        return TerminalMap(sol.qbar(), law, 1.0);
    }();
    return map;
}

void BM_simulate_serial(benchmark::State& st)
{
    auto m = reference();
    for (auto _ : st)
        benchmark::DoNotOptimize(simulate_kernel_serial(m, static_cast<std::size_t>(st.range(0)), 256, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_simulate_omp(benchmark::State& st)
{
    auto m = reference();
    for (auto _ : st)
        benchmark::DoNotOptimize(simulate_kernel(m, static_cast<std::size_t>(st.range(0)), 256, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_replicate_serial(benchmark::State& st)
{
    auto m = reference();
    const auto& map = two_point_map();
    for (auto _ : st)
        benchmark::DoNotOptimize(replicate_and_verify_serial(m, map, static_cast<std::size_t>(st.range(0)), 64, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_replicate_omp(benchmark::State& st)
{
    auto m = reference();
    const auto& map = two_point_map();
    for (auto _ : st)
        benchmark::DoNotOptimize(replicate_and_verify(m, map, static_cast<std::size_t>(st.range(0)), 64, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(BM_simulate_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_simulate_omp)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_replicate_serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_replicate_omp)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
