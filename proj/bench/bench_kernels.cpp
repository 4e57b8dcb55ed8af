// Serial reference kernels against their OpenMP counterparts. Arg(0) is the
// serial path, Arg(1) the parallel one.

#include "pnpvem/mesh_generators.hpp"
#include "pnpvem/pnp_solver.hpp"
#include "pnpvem/sparse.hpp"
#include "pnpvem/vem_local.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace pnpvem;

namespace {

Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

const Discretization& voronoi_disc()
{
    static const PolygonalMesh mesh = generate_voronoi(4096, 5, 7);
    static const Discretization disc(mesh, 2);
    return disc;
}

std::vector<double> wave(std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::sin(0.01 * static_cast<double>(i));
    return v;
}

void BM_spmv(benchmark::State& state)
{
    const auto& a = voronoi_disc().stiffness();
    const auto x = wave(a.n);
    std::vector<double> y(a.n);
    for (auto _ : state) {
        spmv(a, x, y, exec_of(state));
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(a.val.size()));
}

void BM_dot(benchmark::State& state)
{
    const auto x = wave(1 << 20), y = wave(1 << 20);
    for (auto _ : state)
        benchmark::DoNotOptimize(dot(x, y, exec_of(state)));
    state.SetBytesProcessed(state.iterations() * 2 * static_cast<long>(x.size() * sizeof(double)));
}

void BM_axpy(benchmark::State& state)
{
    const auto x = wave(1 << 20);
    auto y = wave(1 << 20);
    for (auto _ : state) {
        axpy(1e-9, x, y, exec_of(state));
        benchmark::DoNotOptimize(y.data());
    }
    state.SetBytesProcessed(state.iterations() * 3 * static_cast<long>(x.size() * sizeof(double)));
}

void BM_assemble_mass(benchmark::State& state)
{
    const auto& disc = voronoi_disc();
    CsrMatrix out = disc.mass().zeros_like();
    for (auto _ : state) {
        disc.assembler().assemble_matrix(
            [&](int e, Eigen::MatrixXd& m) { m = local_mass(disc.spaces()[e]); }, out, exec_of(state));
        benchmark::DoNotOptimize(out.val.data());
    }
}

void BM_assemble_drift(benchmark::State& state)
{
    const auto& disc = voronoi_disc();
    const auto psi = disc.interpolate([](Point p) { return std::sin(3 * p.x) * std::cos(2 * p.y); });
    CsrMatrix out = disc.stiffness().zeros_like();
    for (auto _ : state) {
        disc.drift_matrix(psi, out, exec_of(state));
        benchmark::DoNotOptimize(out.val.data());
    }
}

} // namespace

BENCHMARK(BM_spmv)->Arg(0)->Arg(1);
BENCHMARK(BM_dot)->Arg(0)->Arg(1);
BENCHMARK(BM_axpy)->Arg(0)->Arg(1);
BENCHMARK(BM_assemble_mass)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_drift)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
