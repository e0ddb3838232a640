// Serial vs OpenMP timings for the hot loops.
#include "hallwave/kernels.hpp"
#include "hallwave/scenarios.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace hallwave;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_spmv(benchmark::State& st) {
    const int L = static_cast<int>(st.range(0));
    LatticeSetup s;
    s.geometry = LatticeGeometry::make(L, L, Boundary::open, Boundary::open);
    s.potential = PotentialSpec{LinearPotential{0.1}};
    const auto lat = build_lattice(s);
    std::vector<cplx> x(lat.h.dim()), y(lat.h.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = {std::sin(0.1 * i), std::cos(0.3 * i)};
    for (auto _ : st) {
        kernels::spmv(lat.h.matrix, x, y, exec_of(st));
        benchmark::DoNotOptimize(y.data());
    }
    st.SetItemsProcessed(st.iterations() * lat.h.matrix.val.size());
}

void BM_mode_sum(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    std::vector<double> w(n), t(2000);
    std::vector<cplx> a(n), out(t.size());
    for (int l = 0; l < n; ++l) w[l] = -4 + 8.0 * l / n, a[l] = {1.0 / n, 0.5 / n};
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = 0.1 * k;
    for (auto _ : st) {
        kernels::mode_sum(w, a, t, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * n * t.size());
}

void BM_lorentzian(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    std::vector<double> c(n), w(n, 1.0 / n), grid(4000), out(grid.size());
    for (int l = 0; l < n; ++l) c[l] = -4 + 8.0 * l / n;
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -6 + 12.0 * k / grid.size();
    for (auto _ : st) {
        kernels::lorentzian_sum(c, w, grid, 0.05, 2.0, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * n * grid.size());
}

void BM_history(benchmark::State& st) {
    const int k = static_cast<int>(st.range(0)), n = 2;
    std::vector<cplx> kernel(static_cast<std::size_t>(k) * n * n), hist(static_cast<std::size_t>(k) * n), out(n);
    for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = std::polar(1.0, 0.01 * i);
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] = std::polar(0.5, -0.02 * i);
    for (auto _ : st) {
        kernels::history_sum(kernel, hist, n, k - 1, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * k);
}

}  // namespace

BENCHMARK(BM_spmv)->ArgsProduct({{40, 200}, {0, 1}});
BENCHMARK(BM_mode_sum)->ArgsProduct({{1000, 10000}, {0, 1}});
BENCHMARK(BM_lorentzian)->ArgsProduct({{1000, 10000}, {0, 1}});
BENCHMARK(BM_history)->ArgsProduct({{10000, 100000}, {0, 1}});

BENCHMARK_MAIN();
