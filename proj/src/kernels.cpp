#include "hallwave/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hallwave::kernels {

namespace {
constexpr int kHistoryChunks = 64;
constexpr int kParallelMinRows = 256;
}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void spmv_serial(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
    for (int r = 0; r < a.n; ++r) {
        cplx s{};
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
        y[r] = s;
    }
}

void spmv_parallel(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
#pragma omp parallel for schedule(static) if (a.n >= kParallelMinRows)
    for (int r = 0; r < a.n; ++r) {
        cplx s{};
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
        y[r] = s;
    }
}

void spmv(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y, Exec exec) {
    exec == Exec::serial ? spmv_serial(a, x, y) : spmv_parallel(a, x, y);
}

void mode_sum_serial(std::span<const double> omegas, std::span<const cplx> weights,
                     std::span<const double> times, std::span<cplx> out) {
    const auto nt = static_cast<long>(times.size());
    for (long k = 0; k < nt; ++k) {
        cplx s{};
        for (std::size_t l = 0; l < omegas.size(); ++l) s += weights[l] * std::polar(1.0, -omegas[l] * times[k]);
        out[k] = s;
    }
}

void mode_sum_parallel(std::span<const double> omegas, std::span<const cplx> weights,
                       std::span<const double> times, std::span<cplx> out) {
    const auto nt = static_cast<long>(times.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < nt; ++k) {
        cplx s{};
        for (std::size_t l = 0; l < omegas.size(); ++l) s += weights[l] * std::polar(1.0, -omegas[l] * times[k]);
        out[k] = s;
    }
}

void mode_sum(std::span<const double> omegas, std::span<const cplx> weights, std::span<const double> times,
              std::span<cplx> out, Exec exec) {
    exec == Exec::serial ? mode_sum_serial(omegas, weights, times, out)
                         : mode_sum_parallel(omegas, weights, times, out);
}

void lorentzian_sum_serial(std::span<const double> centers, std::span<const double> weights,
                           std::span<const double> grid, double gamma, double prefactor, std::span<double> out) {
    const double g2 = gamma * gamma;
    const auto ng = static_cast<long>(grid.size());
    for (long k = 0; k < ng; ++k) {
        double s = 0;
        for (std::size_t l = 0; l < centers.size(); ++l) {
            const double d = grid[k] - centers[l];
            s += weights[l] / (d * d + g2);
        }
        out[k] = prefactor * gamma * s;
    }
}

void lorentzian_sum_parallel(std::span<const double> centers, std::span<const double> weights,
                             std::span<const double> grid, double gamma, double prefactor, std::span<double> out) {
    const double g2 = gamma * gamma;
    const auto ng = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < ng; ++k) {
        double s = 0;
        for (std::size_t l = 0; l < centers.size(); ++l) {
            const double d = grid[k] - centers[l];
            s += weights[l] / (d * d + g2);
        }
        out[k] = prefactor * gamma * s;
    }
}

void lorentzian_sum(std::span<const double> centers, std::span<const double> weights, std::span<const double> grid,
                    double gamma, double prefactor, std::span<double> out, Exec exec) {
    exec == Exec::serial ? lorentzian_sum_serial(centers, weights, grid, gamma, prefactor, out)
                         : lorentzian_sum_parallel(centers, weights, grid, gamma, prefactor, out);
}

namespace {

inline void accumulate_term(const cplx* km, const cplx* c, int n, double w, cplx* out) {
    for (int r = 0; r < n; ++r) {
        cplx s{};
        for (int q = 0; q < n; ++q) s += km[r * n + q] * c[q];
        out[r] += w * s;
    }
}

}  // namespace

void history_sum_serial(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k,
                        std::span<cplx> out) {
    const int nn = n * n;
    std::fill(out.begin(), out.begin() + n, cplx{});
    if (k <= 0) return;
    accumulate_term(kernel.data() + static_cast<std::size_t>(k) * nn, history.data(), n, 0.5, out.data());
    for (int j = 1; j < k; ++j)
        accumulate_term(kernel.data() + static_cast<std::size_t>(k - j) * nn,
                        history.data() + static_cast<std::size_t>(j) * n, n, 1.0, out.data());
}

void history_sum_parallel(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k,
                          std::span<cplx> out) {
    const int nn = n * n;
    std::fill(out.begin(), out.begin() + n, cplx{});
    if (k <= 0) return;
    // Fixed chunking keeps the summation order independent of the thread count.
    std::vector<cplx> partial(static_cast<std::size_t>(kHistoryChunks) * n, cplx{});
    const int span_len = k - 1;
#pragma omp parallel for schedule(static) if (span_len >= 4 * kHistoryChunks)
    for (int c = 0; c < kHistoryChunks; ++c) {
        const int lo = 1 + static_cast<int>(static_cast<long>(span_len) * c / kHistoryChunks);
        const int hi = 1 + static_cast<int>(static_cast<long>(span_len) * (c + 1) / kHistoryChunks);
        cplx* acc = partial.data() + static_cast<std::size_t>(c) * n;
        for (int j = lo; j < hi; ++j)
            accumulate_term(kernel.data() + static_cast<std::size_t>(k - j) * nn,
                            history.data() + static_cast<std::size_t>(j) * n, n, 1.0, acc);
    }
    accumulate_term(kernel.data() + static_cast<std::size_t>(k) * nn, history.data(), n, 0.5, out.data());
    for (int c = 0; c < kHistoryChunks; ++c)
        for (int r = 0; r < n; ++r) out[r] += partial[static_cast<std::size_t>(c) * n + r];
}

void history_sum(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k, std::span<cplx> out,
                 Exec exec) {
    exec == Exec::serial ? history_sum_serial(kernel, history, n, k, out)
                         : history_sum_parallel(kernel, history, n, k, out);
}

}  // namespace hallwave::kernels
