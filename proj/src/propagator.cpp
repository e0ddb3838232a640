#include "hallwave/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hallwave {

cplx greens_exact(const EigenDecomposition& eig, double t, int i, int j) {
    cplx s{};
    for (int l = 0; l < eig.dim(); ++l)
        s += eig.modes(i, l) * std::conj(eig.modes(j, l)) * std::polar(1.0, -eig.omegas[l] * t);
    return s;
}

std::vector<cplx> greens_exact_series(const EigenDecomposition& eig, int i, int j, const std::vector<double>& times,
                                      kernels::Exec exec) {
    std::vector<double> om(eig.dim());
    std::vector<cplx> w(eig.dim());
    for (int l = 0; l < eig.dim(); ++l) {
        om[l] = eig.omegas[l];
        w[l] = eig.modes(i, l) * std::conj(eig.modes(j, l));
    }
    std::vector<cplx> out(times.size());
    kernels::mode_sum(om, w, times, out, exec);
    return out;
}

cplx greens_lll(const LandauAnalytics& p, double t, double xi, double yi, double xj, double yj, ContinuumMode mode,
                double Ly) {
    const double lb = p.l_B;
    const double dx = xi - xj;
    const double dy = yi - yj;
    const double xbar = 0.5 * (xi + xj);
    const double c = -p.U_B / p.omega_B + xbar / lb;
    const double envelope_x = std::exp(-dx * dx / (4.0 * lb * lb));
    if (mode == ContinuumMode::infinite) {
        const double b = dy / lb - p.U_B * t;
        const double phase = -c * b - p.omega_ch(xbar) * t;
        return p.alpha * envelope_x * std::exp(-0.25 * b * b) * std::polar(1.0, phase);
    }
    if (!(Ly > 0)) throw std::invalid_argument("finite-Ly continuum kernel needs Ly > 0");
    // Modes with Gaussian weight exp(-u^2) above 1e-12.
    const double umax = std::sqrt(-std::log(1e-12));
    const double dk = 2.0 * std::numbers::pi / Ly;
    const long n_lo = static_cast<long>(std::ceil((-umax - c) / (lb * dk)));
    const long n_hi = static_cast<long>(std::floor((umax - c) / (lb * dk)));
    cplx s{};
    for (long n = n_lo; n <= n_hi; ++n) {
        const double k = n * dk;
        const double u = lb * k + c;
        const double wk = p.level(0) + p.omega_H(k);
        s += std::exp(-u * u) * std::polar(1.0, k * dy - wk * t);
    }
    return envelope_x * s / (Ly * std::sqrt(std::numbers::pi) * lb);
}

cplx ContinuumKernel::operator()(double t, double xi, double yi, double xj, double yj) const {
    return greens_lll(params, t, xi, yi, xj, yj, mode, Ly);
}

LocalSpectrum local_spectrum(const EigenDecomposition& eig, int site) {
    LocalSpectrum s;
    s.omegas.assign(eig.omegas.data(), eig.omegas.data() + eig.dim());
    s.weights.resize(eig.dim());
    for (int l = 0; l < eig.dim(); ++l) s.weights[l] = std::norm(eig.modes(site, l));
    return s;
}

bool ky_block_eligible(const HoppingOperator& h) {
    const auto& g = h.geometry;
    if (g.bc_y != Boundary::periodic || g.ny < 3) return false;
    for (int y = 1; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x)
            if (h.diagonal[g.index(x, y)] != h.diagonal[g.index(x, 0)]) return false;
    return true;
}

LocalSpectrum local_spectrum(const HoppingOperator& h, int site, int cap) {
    if (!ky_block_eligible(h)) return local_spectrum(diagonalize(h, cap), site);
    const auto& g = h.geometry;
    const int xs = g.x_of(site);
    const double two_pi_alpha = 2.0 * std::numbers::pi * h.alpha;
    LocalSpectrum s;
    for (int n = 0; n < g.ny; ++n) {
        const double k = 2.0 * std::numbers::pi * n / g.ny;
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(g.nx, g.nx);
        for (int x = 0; x < g.nx; ++x) {
            b(x, x) = h.diagonal[g.index(x, 0)] - 2.0 * std::cos(k + two_pi_alpha * x);
            if (x + 1 < g.nx) b(x, x + 1) = b(x + 1, x) = -1.0;
        }
        if (g.bc_x == Boundary::periodic && g.nx >= 3) b(0, g.nx - 1) = b(g.nx - 1, 0) = -1.0;
        const auto e = diagonalize_dense(b);
        for (int l = 0; l < g.nx; ++l) {
            s.omegas.push_back(e.omegas[l]);
            s.weights.push_back(std::norm(e.modes(xs, l)) / g.ny);
        }
    }
    return s;
}

double ldos_centroid(const LocalSpectrum& s, double center, double half_width) {
    double num = 0, den = 0;
    for (std::size_t l = 0; l < s.omegas.size(); ++l) {
        if (std::abs(s.omegas[l] - center) > half_width) continue;
        num += s.weights[l] * s.omegas[l];
        den += s.weights[l];
    }
    if (den <= 0) throw std::runtime_error("no spectral weight inside the calibration window");
    return num / den;
}

LdosProfile ldos_numeric(const LocalSpectrum& s, int site, const std::vector<double>& grid, double gamma,
                         kernels::Exec exec) {
    if (!(gamma > 0)) throw std::invalid_argument("numeric LDOS needs gamma > 0");
    LdosProfile p{site, grid, std::vector<double>(grid.size()), gamma};
    kernels::lorentzian_sum(s.omegas, s.weights, grid, gamma, 2.0, p.values, exec);
    return p;
}

std::vector<double> ldos_analytic(const LandauAnalytics& p, double x, int ell, const std::vector<double>& grid) {
    if (ell < 0 || ell > kMaxLandauIndex) {
        throw std::out_of_range("analytic LDOS supports Landau index 0.." + std::to_string(kMaxLandauIndex));
    }
    if (!(p.U_B > 0)) throw std::invalid_argument("analytic LDOS needs U_B > 0 (flat levels are delta peaks)");
    const double norm = 2.0 * std::sqrt(std::numbers::pi) * p.alpha / p.U_B / std::ldexp(std::tgamma(ell + 1.0), ell);
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double u = (grid[k] - p.omega_ch(x) - ell * p.omega_B) / p.U_B;
        const double h = hermite(ell, u);
        out[k] = norm * h * h * std::exp(-u * u);
    }
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t k = 1; k < x.size(); ++k) s += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    return s;
}

LocalField local_field(const PotentialField& v, double alpha, int x, int y) {
    const auto& g = v.geometry;
    if (!g.contains(x, y)) throw std::out_of_range("local_field: position outside the lattice");
    const int i = g.index(x, y);
    const int xp = g.neighbor(i, 1, 0), xm = g.neighbor(i, -1, 0);
    const int yp = g.neighbor(i, 0, 1), ym = g.neighbor(i, 0, -1);
    if (xp < 0 || xm < 0 || yp < 0 || ym < 0) {
        std::ostringstream msg;
        msg << "local_field: (" << x << "," << y << ") lies on an open boundary; central differences need both neighbors";
        throw std::domain_error(msg.str());
    }
    const auto p = LandauAnalytics::make(alpha, 0.0);
    LocalField f;
    f.V = v.values[i];
    f.grad_x = 0.5 * (v.values[xp] - v.values[xm]);
    f.grad_y = 0.5 * (v.values[yp] - v.values[ym]);
    f.grad_norm = std::hypot(f.grad_x, f.grad_y);
    f.U_B_tilde = f.grad_norm * p.l_B;
    f.omega_ch_tilde = p.level(0) + f.V + f.U_B_tilde * f.U_B_tilde / (2.0 * p.omega_B);
    f.speed = f.grad_norm * p.l_B * p.l_B;
    return f;
}

DemuxResult demux_position(double omega_in, const LandauAnalytics& p, const LatticeGeometry& g) {
    if (!(p.U_B > 0)) throw std::invalid_argument("demultiplexing needs U_B > 0");
    DemuxResult r;
    r.x_out = -p.l_B * (omega_in - p.omega_ch(0.0)) / p.U_B;
    r.delta_omega = p.U_B;
    r.channels = static_cast<int>(std::floor(g.nx / p.l_B));
    if (r.x_out < 0 || r.x_out > g.nx - 1) {
        std::ostringstream msg;
        msg << "input frequency " << omega_in << " maps to x_out = " << r.x_out
            << " outside the lattice; admissible window is [" << p.omega_ch(g.nx - 1.0) << ", " << p.omega_ch(0.0)
            << "]";
        throw std::out_of_range(msg.str());
    }
    return r;
}

}  // namespace hallwave
