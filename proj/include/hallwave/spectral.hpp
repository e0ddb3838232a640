// spectral.hpp - exact diagonalization, Landau-level analytics, excitation spectra
#pragma once

#include "hallwave/kernels.hpp"
#include "hallwave/lattice.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hallwave {

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kDefaultDenseCap = 5000;

// Ascending eigenfrequencies, orthonormal mode columns. Each column has its first
// component with |f| > 1e-10 rotated to be real and positive.
struct EigenDecomposition {
    Eigen::VectorXd omegas;
    Eigen::MatrixXcd modes;

    int dim() const { return static_cast<int>(omegas.size()); }
    double max_residual(const SparseMatrix& h) const;
    double unitarity_defect() const;
    double completeness_defect() const;
};

EigenDecomposition diagonalize(const SparseMatrix& h, int cap = kDefaultDenseCap);
EigenDecomposition diagonalize(const HoppingOperator& h, int cap = kDefaultDenseCap);
EigenDecomposition diagonalize_dense(const Eigen::MatrixXcd& h);

Eigen::MatrixXcd to_dense(const SparseMatrix& h);

double mode_center_x(const LatticeGeometry& g, const Eigen::Ref<const Eigen::VectorXcd>& mode);

// Continuum Landau-level quantities in units hbar = J = l0 = 1, omega_p = 0.
// Positions x are measured from the zero of the linear potential.
struct LandauAnalytics {
    double alpha{0}, U0{0};
    double l_B{0}, omega_B{0}, U_B{0}, c_H{0};
    double omega_b{-4.0};
    double omega_b_appendix{-0.5};
    double mass{0.5};

    static LandauAnalytics make(double alpha, double U0);

    bool continuum_questionable() const { return l_B <= 1.0; }
    double shift2(int ell) const;
    double level(int ell) const;
    double omega_H(double k) const { return c_H * k - U_B * U_B / (2.0 * omega_B); }
    double k_of_x(double x) const { return (U_B * l_B / omega_B - x) / (l_B * l_B); }
    double omega_ch(double x) const;
    double critical_g() const { return U_B / std::sqrt(alpha); }
};

double analytic_spectrum_k(const LandauAnalytics& p, int ell, double k);
double analytic_spectrum_x(const LandauAnalytics& p, int ell, double x);

// Normalized oscillator function phi_ell(u), u in units of l0.
double oscillator_function(int ell, double u, double l_B);
double hermite(int n, double x);

constexpr int kMaxLandauIndex = 10;

cplx landau_orbital(const LandauAnalytics& p, int ell, double k, double x, double y, double Ly);

struct ExcitationSpectrum {
    std::vector<double> omega;
    std::vector<double> S;
    double gamma{0};
    double weight_outside{0};  // Lorentzian mass falling off the grid
};

ExcitationSpectrum excitation_spectrum(const EigenDecomposition& coupled, int emitter_row,
                                       const std::vector<double>& grid, double gamma,
                                       kernels::Exec exec = kernels::Exec::parallel);

std::vector<double> linspace(double a, double b, int n);

}  // namespace hallwave
