#include "hallwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace hallwave {

Eigen::MatrixXcd to_dense(const SparseMatrix& h) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(h.n, h.n);
    for (int r = 0; r < h.n; ++r)
        for (int k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k) d(r, h.col[k]) = h.val[k];
    return d;
}

namespace {

void fix_phases(Eigen::MatrixXcd& modes) {
    for (Eigen::Index c = 0; c < modes.cols(); ++c) {
        for (Eigen::Index r = 0; r < modes.rows(); ++r) {
            const cplx v = modes(r, c);
            if (std::abs(v) > 1e-10) {
                modes.col(c) *= std::conj(v) / std::abs(v);
                modes(r, c) = std::abs(v);
                break;
            }
        }
    }
}

}  // namespace

EigenDecomposition diagonalize_dense(const Eigen::MatrixXcd& h) {
    const auto n = static_cast<lapack_int>(h.rows());
    EigenDecomposition e;
    e.modes = h;
    e.omegas.resize(n);
    if (n == 0) return e;
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, e.modes.data(), n, e.omegas.data());
    if (info != 0) throw std::runtime_error("zheevd failed with info = " + std::to_string(info));
    fix_phases(e.modes);
    return e;
}

EigenDecomposition diagonalize(const SparseMatrix& h, int cap) {
    if (h.n > cap) {
        throw DimensionError("dense diagonalization of dimension " + std::to_string(h.n) + " exceeds the cap " +
                             std::to_string(cap) + "; use the time-evolution workflows (evolve) instead");
    }
    return diagonalize_dense(to_dense(h));
}

EigenDecomposition diagonalize(const HoppingOperator& h, int cap) { return diagonalize(h.matrix, cap); }

double EigenDecomposition::max_residual(const SparseMatrix& h) const {
    double worst = 0;
    std::vector<cplx> x(dim()), y(dim());
    for (int l = 0; l < dim(); ++l) {
        for (int i = 0; i < dim(); ++i) x[i] = modes(i, l);
        kernels::spmv_serial(h, x, y);
        double acc = 0;
        for (int i = 0; i < dim(); ++i) acc += std::norm(y[i] - omegas[l] * x[i]);
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

double EigenDecomposition::unitarity_defect() const {
    const Eigen::MatrixXcd g = modes.adjoint() * modes;
    return (g - Eigen::MatrixXcd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

double EigenDecomposition::completeness_defect() const {
    double worst = 0;
    for (int i = 0; i < dim(); ++i) worst = std::max(worst, std::abs(modes.row(i).squaredNorm() - 1.0));
    return worst;
}

double mode_center_x(const LatticeGeometry& g, const Eigen::Ref<const Eigen::VectorXcd>& mode) {
    double num = 0, den = 0;
    for (int i = 0; i < g.sites(); ++i) {
        const double w = std::norm(mode[i]);
        num += g.x_of(i) * w;
        den += w;
    }
    return den > 0 ? num / den : 0.0;
}

LandauAnalytics LandauAnalytics::make(double alpha, double U0) {
    if (!(alpha > 0)) throw ConfigError("Landau analytics need alpha > 0");
    LandauAnalytics p;
    p.alpha = alpha;
    p.U0 = U0;
    p.l_B = 1.0 / std::sqrt(2.0 * std::numbers::pi * alpha);
    p.omega_B = 4.0 * std::numbers::pi * alpha;
    p.U_B = U0 * p.l_B;
    p.c_H = p.U_B * p.l_B;
    return p;
}

double LandauAnalytics::shift2(int ell) const {
    return -(omega_B * omega_B / 32.0) * (2.0 * ell * ell + 2.0 * ell + 1.0);
}

double LandauAnalytics::level(int ell) const { return omega_b + omega_B * (ell + 0.5) + shift2(ell); }

double LandauAnalytics::omega_ch(double x) const {
    return level(0) - U_B * x / l_B + U_B * U_B / (2.0 * omega_B);
}

double analytic_spectrum_k(const LandauAnalytics& p, int ell, double k) {
    if (ell < 0) throw std::invalid_argument("Landau index must be >= 0");
    return p.level(ell) + p.omega_H(k);
}

double analytic_spectrum_x(const LandauAnalytics& p, int ell, double x) {
    return analytic_spectrum_k(p, ell, p.k_of_x(x));
}

double hermite(int n, double x) {
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * x;
    for (int m = 1; m < n; ++m) {
        const double h2 = 2.0 * x * h1 - 2.0 * m * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double oscillator_function(int ell, double u, double l_B) {
    if (ell < 0 || ell > kMaxLandauIndex) {
        throw std::out_of_range("Landau index " + std::to_string(ell) + " outside [0, " +
                                std::to_string(kMaxLandauIndex) + "]");
    }
    const double s = u / l_B;
    const double norm = std::sqrt(std::ldexp(std::tgamma(ell + 1.0), ell) * std::sqrt(std::numbers::pi) * l_B);
    return hermite(ell, s) * std::exp(-0.5 * s * s) / norm;
}

cplx landau_orbital(const LandauAnalytics& p, int ell, double k, double x, double y, double Ly) {
    const double u = x + p.l_B * p.l_B * k - p.l_B * p.U_B / p.omega_B;
    return std::polar(1.0 / std::sqrt(Ly), k * y) * oscillator_function(ell, u, p.l_B);
}

ExcitationSpectrum excitation_spectrum(const EigenDecomposition& coupled, int emitter_row,
                                       const std::vector<double>& grid, double gamma, kernels::Exec exec) {
    if (!(gamma > 0)) throw std::invalid_argument("excitation_spectrum: gamma must be > 0");
    if (emitter_row < 0 || emitter_row >= coupled.dim()) throw std::out_of_range("emitter row out of range");
    ExcitationSpectrum s;
    s.omega = grid;
    s.gamma = gamma;
    s.S.assign(grid.size(), 0.0);
    std::vector<double> centers(coupled.dim()), weights(coupled.dim());
    for (int v = 0; v < coupled.dim(); ++v) {
        centers[v] = coupled.omegas[v];
        weights[v] = std::norm(coupled.modes(emitter_row, v));
    }
    kernels::lorentzian_sum(centers, weights, grid, gamma, 1.0 / std::numbers::pi, s.S, exec);
    if (!grid.empty()) {
        const double lo = grid.front(), hi = grid.back();
        for (int v = 0; v < coupled.dim(); ++v) {
            const double inside = (std::atan((hi - centers[v]) / gamma) - std::atan((lo - centers[v]) / gamma)) /
                                  std::numbers::pi;
            s.weight_outside += weights[v] * (1.0 - inside);
        }
    }
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(std::max(n, 0));
    if (n == 1) v[0] = a;
    for (int i = 0; i < n && n > 1; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace hallwave
