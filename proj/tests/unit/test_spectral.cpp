#include "hallwave/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hallwave;

namespace {

constexpr double pi = std::numbers::pi;

HoppingOperator operator_for(int nx, int ny, Boundary bx, Boundary by, double alpha, double U0) {
    const auto g = LatticeGeometry::make(nx, ny, bx, by);
    return assemble_hamiltonian(g, build_gauge(g, alpha), build_potential(g, PotentialSpec{LinearPotential{U0}}));
}

}  // namespace

TEST_CASE("Landau scales at alpha = 1/10") {
    const auto p = LandauAnalytics::make(0.1, 0.1);
    // hand evaluation: 4 pi / 10, 1 / sqrt(pi / 5)
    CHECK(p.omega_B == doctest::Approx(1.2566370614359172).epsilon(1e-14));
    CHECK(p.l_B == doctest::Approx(1.2615662610100802).epsilon(1e-14));
    CHECK(p.U_B == doctest::Approx(0.12615662610100802).epsilon(1e-14));
    CHECK(p.c_H == doctest::Approx(0.15915494309189535).epsilon(1e-14));
    CHECK(p.c_H == doctest::Approx(0.1 / (2 * pi * 0.1)).epsilon(1e-14));
    CHECK(p.critical_g() == doctest::Approx(0.12615662610100802 / std::sqrt(0.1)).epsilon(1e-14));
    CHECK_FALSE(p.continuum_questionable());
    CHECK(LandauAnalytics::make(0.2, 0).continuum_questionable());
    CHECK_THROWS_AS(LandauAnalytics::make(0.0, 0.1), ConfigError);
}

TEST_CASE("lowest Landau level with its second-order shift") {
    const auto p = LandauAnalytics::make(0.1, 0.0);
    const double wB = 0.4 * pi;
    CHECK(p.level(0) == doctest::Approx(-4 + wB / 2 - wB * wB / 32).epsilon(1e-14));
    CHECK(p.level(1) - p.level(0) == doctest::Approx(wB - wB * wB / 8).epsilon(1e-14));
    CHECK(analytic_spectrum_x(p, 0, 3.0) == doctest::Approx(p.level(0)).epsilon(1e-14));
    CHECK_THROWS(analytic_spectrum_k(p, -1, 0.0));
    CHECK(p.omega_b_appendix == -0.5);
}

TEST_CASE("analytic spectrum in x agrees with the channel frequency") {
    const auto p = LandauAnalytics::make(0.1, 0.05);
    for (double x : {-7.0, 0.0, 2.5, 19.0}) {
        CHECK(analytic_spectrum_x(p, 0, x) == doctest::Approx(p.omega_ch(x)).epsilon(1e-13));
        // x(k) inverts k(x)
        const double k = p.k_of_x(x);
        CHECK(-p.l_B * p.l_B * k + p.U_B * p.l_B / p.omega_B == doctest::Approx(x).epsilon(1e-13));
    }
    CHECK(analytic_spectrum_x(p, 0, 1.0) - analytic_spectrum_x(p, 0, 2.0) == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("mode center") {
    const auto g = LatticeGeometry::make(3, 2, Boundary::open, Boundary::open);
    Eigen::VectorXcd u = Eigen::VectorXcd::Constant(6, 1.0 / std::sqrt(6.0));
    CHECK(mode_center_x(g, u) == doctest::Approx(1.0));
    const auto g2 = LatticeGeometry::make(10, 4, Boundary::open, Boundary::open);
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(40);
    d[g2.index(7, 2)] = cplx(0, 1);
    CHECK(mode_center_x(g2, d) == 7.0);
}

TEST_CASE("diagonalization: residual, orthonormality, completeness, phase convention") {
    const auto g = LatticeGeometry::make(12, 10, Boundary::open, Boundary::periodic);
    const auto h = assemble_hamiltonian(g, build_gauge(g, 0.1), build_potential(g, PotentialSpec{DisorderPotential{0.3}}, 4));
    const auto eig = diagonalize(h);
    CHECK(eig.max_residual(h.matrix) < 1e-11);
    CHECK(eig.unitarity_defect() < 1e-11);
    CHECK(eig.completeness_defect() < 1e-10);
    for (int i = 1; i < eig.dim(); ++i) CHECK(eig.omegas[i] >= eig.omegas[i - 1]);
    for (int v = 0; v < eig.dim(); ++v) {
        int first = 0;
        while (std::abs(eig.modes(first, v)) <= 1e-10) ++first;
        CHECK(eig.modes(first, v).imag() == 0.0);
        CHECK(eig.modes(first, v).real() > 0.0);
    }
    const auto again = diagonalize(h);
    CHECK(again.modes == eig.modes);
    CHECK_THROWS_AS(diagonalize(h, 100), DimensionError);
}

TEST_CASE("lowest-level degeneracy at zero field gradient equals M alpha") {
    SUBCASE("torus: exact Hofstadter count") {
        const auto h = operator_for(30, 30, Boundary::periodic, Boundary::periodic, 0.1, 0.0);
        const auto eig = diagonalize(h);
        const auto p = LandauAnalytics::make(0.1, 0.0);
        int count = 0;
        for (int v = 0; v < eig.dim(); ++v) count += std::abs(eig.omegas[v] - p.level(0)) <= p.omega_B / 4;
        CHECK(std::abs(count - 900 * 0.1) <= 0.1 * 90);
    }
    SUBCASE("open cylinder within 10 percent") {
        const auto h = operator_for(40, 40, Boundary::open, Boundary::periodic, 0.1, 0.0);
        const auto eig = diagonalize(h);
        const auto p = LandauAnalytics::make(0.1, 0.0);
        int count = 0;
        for (int v = 0; v < eig.dim(); ++v) count += std::abs(eig.omegas[v] - p.level(0)) <= p.omega_B / 4;
        CHECK(std::abs(count - 160.0) <= 16.0);
    }
}

TEST_CASE("lowest-level mode centers follow -l_B^2 k + U_B l_B / omega_B modulo 1/alpha") {
    const double alpha = 0.1, U0 = 0.05;
    const auto h = operator_for(40, 40, Boundary::open, Boundary::periodic, alpha, U0);
    const auto& g = h.geometry;
    const auto eig = diagonalize(h);
    const auto p = LandauAnalytics::make(alpha, U0);
    int checked = 0;
    for (int v = 0; v < eig.dim(); ++v) {
        const double xc = mode_center_x(g, eig.modes.col(v));
        if (xc < 8 || xc > 31) continue;
        if (std::abs(eig.omegas[v] - p.omega_ch(xc)) > 0.1) continue;
        int best = 0;
        for (int i = 1; i < g.sites(); ++i)
            if (std::abs(eig.modes(i, v)) > std::abs(eig.modes(best, v))) best = i;
        const double k = std::arg(eig.modes(g.neighbor(best, 0, 1), v) / eig.modes(best, v));
        const double predicted = -p.l_B * p.l_B * k + p.U_B * p.l_B / p.omega_B;
        CHECK(std::abs(std::remainder(xc - predicted, 1.0 / alpha)) < 0.5);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("oscillator orbitals: normalization on the grid, node, orthogonality") {
    const auto p = LandauAnalytics::make(0.1, 0.1);
    const double Ly = 40, k = -0.9;
    const double center = -p.l_B * p.l_B * k + p.U_B * p.l_B / p.omega_B;
    for (int ell = 0; ell <= 3; ++ell) {
        double s = 0;
        for (int x = -30; x <= 30; ++x)
            for (int y = 0; y < Ly; ++y) s += std::norm(landau_orbital(p, ell, k, x, y, Ly));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(std::abs(landau_orbital(p, 1, k, center, 3.0, Ly)) < 1e-15);
    // l=0 is maximal at the center
    const double peak = std::abs(landau_orbital(p, 0, k, center, 0, Ly));
    CHECK(std::abs(landau_orbital(p, 0, k, center + 0.3, 0, Ly)) < peak);
    CHECK(std::abs(landau_orbital(p, 0, k, center - 0.3, 0, Ly)) < peak);
    double overlap = 0;
    for (int i = -40000; i <= 40000; ++i) {
        const double u = 1e-3 * i;
        overlap += oscillator_function(0, u - 0.2, p.l_B) * oscillator_function(1, u - 0.2, p.l_B) * 1e-3;
    }
    CHECK(std::abs(overlap) < 1e-6);
    CHECK_THROWS_AS(oscillator_function(11, 0.0, 1.0), std::out_of_range);
    CHECK(hermite(3, 0.7) == doctest::Approx(8 * 0.343 - 12 * 0.7));
}

TEST_CASE("excitation spectrum of a decoupled emitter is one Lorentzian at omega_e") {
    const auto h = operator_for(8, 8, Boundary::open, Boundary::open, 0.1, 0.0);
    EmitterSet em{{Emitter{4, 4, -2.7, 0.0}}};
    const auto ch = build_coupled_hamiltonian(h, em);
    const auto eig = diagonalize(ch.matrix);
    const auto grid = linspace(-4, -1.4, 2601);
    const double gamma = 0.015;
    const auto s = excitation_spectrum(eig, ch.emitter_row(0), grid, gamma);
    for (std::size_t i = 0; i < grid.size(); i += 50) {
        const double d = grid[i] + 2.7;
        CHECK(s.S[i] == doctest::Approx(gamma / pi / (d * d + gamma * gamma)).epsilon(1e-9));
    }
    CHECK(s.weight_outside == doctest::Approx(1 - (std::atan(1.3 / gamma) + std::atan(1.3 / gamma)) / pi).epsilon(1e-9));
    CHECK_THROWS(excitation_spectrum(eig, ch.emitter_row(0), grid, 0.0));
}

TEST_CASE("strong coupling splits the emitter line by Omega = g sqrt(alpha)") {
    // alpha = 1/20, U0 = 0.01, g sqrt(alpha) = 8 U_B
    const double alpha = 0.05, U0 = 0.01;
    const auto p = LandauAnalytics::make(alpha, U0);
    const double g = 8 * p.U_B / std::sqrt(alpha);
    CHECK(g * std::sqrt(alpha) == doctest::Approx(0.14274).epsilon(1e-4));
    const auto h = operator_for(40, 40, Boundary::open, Boundary::periodic, alpha, U0);
    const auto lat_omega = [&] {
        const auto ls = local_spectrum(h, h.geometry.index(20, 20));
        return ldos_centroid(ls, p.omega_ch(20.0 - 0.0), p.omega_B / 2);
    }();
    EmitterSet em{{Emitter{20, 20, lat_omega, g}}};
    const auto ch = build_coupled_hamiltonian(h, em);
    const auto eig = diagonalize(ch.matrix);
    const auto grid = linspace(lat_omega - 0.3, lat_omega + 0.3, 1201);
    const auto s = excitation_spectrum(eig, ch.emitter_row(0), grid, 0.005);
    // two dominant maxima
    std::vector<std::pair<double, double>> peaks;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (s.S[i] > s.S[i - 1] && s.S[i] >= s.S[i + 1]) peaks.push_back({s.S[i], grid[i]});
    std::sort(peaks.rbegin(), peaks.rend());
    REQUIRE(peaks.size() >= 2);
    const double split = std::abs(peaks[0].second - peaks[1].second);
    CHECK(split == doctest::Approx(g * std::sqrt(alpha)).epsilon(0.1));
}

TEST_CASE("linspace") {
    const auto v = linspace(0, 1, 5);
    CHECK(v == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(linspace(2, 3, 1) == std::vector<double>{2});
    CHECK(linspace(2, 3, 0).empty());
}
