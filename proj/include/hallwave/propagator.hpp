// propagator.hpp - Green's functions, LDOS, local-field quantities
#pragma once

#include "hallwave/spectral.hpp"

#include <vector>

namespace hallwave {

cplx greens_exact(const EigenDecomposition& eig, double t, int i, int j);
std::vector<cplx> greens_exact_series(const EigenDecomposition& eig, int i, int j, const std::vector<double>& times,
                                      kernels::Exec exec = kernels::Exec::parallel);

enum class ContinuumMode { finite_ly, infinite };

// Lowest-Landau-level propagator for a linear potential, photons drifting toward +y.
// Positions are continuum coordinates measured from the zero of the potential;
// dy = y_i - y_j runs from source j to destination i.
struct ContinuumKernel {
    LandauAnalytics params;
    ContinuumMode mode{ContinuumMode::infinite};
    double Ly{0};

    cplx operator()(double t, double xi, double yi, double xj, double yj) const;
};

cplx greens_lll(const LandauAnalytics& p, double t, double xi, double yi, double xj, double yj,
                ContinuumMode mode, double Ly = 0);

// Local spectral weights |f_l(r)|^2 and their frequencies.
struct LocalSpectrum {
    std::vector<double> omegas;
    std::vector<double> weights;
};

LocalSpectrum local_spectrum(const EigenDecomposition& eig, int site);
// Uses per-k blocks when y is periodic and the potential does not depend on y,
// otherwise full diagonalization.
LocalSpectrum local_spectrum(const HoppingOperator& h, int site, int cap = kDefaultDenseCap);
bool ky_block_eligible(const HoppingOperator& h);

// Weighted mean frequency of the local weights inside [center - half_width, center + half_width].
double ldos_centroid(const LocalSpectrum& s, double center, double half_width);

struct LdosProfile {
    int site{-1};
    std::vector<double> omega;
    std::vector<double> values;
    double gamma{0};
};

// rho(w) = sum_l |f_l(r)|^2 2 gamma / ((w - w_l)^2 + gamma^2)
LdosProfile ldos_numeric(const LocalSpectrum& s, int site, const std::vector<double>& grid, double gamma,
                         kernels::Exec exec = kernels::Exec::parallel);
// Continuum level ell at position x; each level integrates to alpha over d(omega)/2pi.
std::vector<double> ldos_analytic(const LandauAnalytics& p, double x, int ell, const std::vector<double>& grid);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

struct LocalField {
    double V{0};
    double grad_x{0}, grad_y{0}, grad_norm{0};
    double U_B_tilde{0};
    double omega_ch_tilde{0};
    double speed{0};
};

LocalField local_field(const PotentialField& v, double alpha, int x, int y);

struct DemuxResult {
    double x_out{0};
    double delta_omega{0};
    int channels{0};
};

// x_out where omega_ch(x_out) = omega_in, with omega_ch measured from x = 0.
DemuxResult demux_position(double omega_in, const LandauAnalytics& p, const LatticeGeometry& g);

}  // namespace hallwave
