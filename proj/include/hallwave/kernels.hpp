// kernels.hpp - hot loops, each in a serial reference and an OpenMP variant
//
// Parallel variants partition work so that results do not depend on the thread count.
#pragma once

#include "hallwave/lattice.hpp"

#include <span>

namespace hallwave::kernels {

enum class Exec { serial, parallel };

int max_threads();

// y = A x
void spmv_serial(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y);
void spmv_parallel(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y);
void spmv(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y, Exec exec);

// out[k] = sum_l weights[l] exp(-i omegas[l] times[k])
void mode_sum_serial(std::span<const double> omegas, std::span<const cplx> weights,
                     std::span<const double> times, std::span<cplx> out);
void mode_sum_parallel(std::span<const double> omegas, std::span<const cplx> weights,
                       std::span<const double> times, std::span<cplx> out);
void mode_sum(std::span<const double> omegas, std::span<const cplx> weights,
              std::span<const double> times, std::span<cplx> out, Exec exec);

// out[k] = prefactor * sum_l weights[l] gamma / ((grid[k]-centers[l])^2 + gamma^2)
void lorentzian_sum_serial(std::span<const double> centers, std::span<const double> weights,
                           std::span<const double> grid, double gamma, double prefactor, std::span<double> out);
void lorentzian_sum_parallel(std::span<const double> centers, std::span<const double> weights,
                             std::span<const double> grid, double gamma, double prefactor, std::span<double> out);
void lorentzian_sum(std::span<const double> centers, std::span<const double> weights,
                    std::span<const double> grid, double gamma, double prefactor, std::span<double> out,
                    Exec exec);

// Volterra history term for an n x n kernel table stored as kernel[m*n*n + r*n + c]:
// out = 0.5 K[k] c_0 + sum_{j=1}^{k-1} K[k-j] c_j, with c_j = history[j*n .. j*n+n).
void history_sum_serial(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k,
                        std::span<cplx> out);
void history_sum_parallel(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k,
                          std::span<cplx> out);
void history_sum(std::span<const cplx> kernel, std::span<const cplx> history, int n, int k,
                 std::span<cplx> out, Exec exec);

}  // namespace hallwave::kernels
