#include "hallwave/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hallwave;

namespace {

LatticeSetup linear_setup(int nx, int ny, Boundary by, double U0, double alpha = 0.1) {
    LatticeSetup s;
    s.geometry = LatticeGeometry::make(nx, ny, Boundary::open, by);
    s.alpha = alpha;
    s.potential = PotentialSpec{LinearPotential{U0}};
    return s;
}

}  // namespace

TEST_CASE("histogram quantiles interpolate inside unit bins") {
    const std::vector<double> flat(10, 1.0);
    CHECK(histogram_quantile(flat, 0, 0.5) == doctest::Approx(4.5));
    CHECK(histogram_quantile(flat, -3, 0.1) == doctest::Approx(-3.5 + 1.0));
    CHECK(histogram_quantile({0, 0, 4, 0}, 0, 0.25) == doctest::Approx(1.5 + 0.25));
    CHECK(std::isnan(histogram_quantile({0, 0}, 0, 0.5)));
}

TEST_CASE("log-linear fits recover synthetic rates and lengths") {
    std::vector<double> t, p;
    for (int k = 0; k <= 200; ++k) {
        t.push_back(0.1 * k);
        p.push_back(0.7 * std::exp(-0.3 * 0.1 * k));
    }
    CHECK(fit_decay_rate(t, p, 2, 15) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::isnan(fit_decay_rate(t, p, 30, 40)));

    WavepacketMetrics m;
    m.offset_lo = -5;
    for (int o = -5; o < 40; ++o) m.h_y.push_back(o < 0 ? 0.0 : 2.0 * std::exp(-o / 6.5));
    CHECK(fit_tail_length(m, 3, 30) == doctest::Approx(6.5).epsilon(1e-12));
}

TEST_CASE("packet metrics of a separable Gaussian") {
    const auto g = LatticeGeometry::make(31, 60, Boundary::open, Boundary::periodic);
    std::vector<double> d(g.sites());
    const double sx = 1.3, sy = 1.5;
    for (int i = 0; i < g.sites(); ++i) {
        const double dx = g.x_of(i) - 15.0;
        const double dy = g.dy_wrapped(g.y_of(i), 55.0);
        d[i] = std::exp(-dx * dx / (2 * sx * sx) - dy * dy / (2 * sy * sy));
    }
    const auto m = packet_metrics(g, d, 15, 50, 1.26, +1);
    CHECK(m.x_mean == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(m.sigma_x == doctest::Approx(sx).epsilon(1e-3));
    CHECK(m.y_offset_mean == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(m.sigma_y == doctest::Approx(sy).epsilon(1e-3));
    CHECK(std::abs(m.skew_kelly) < 1e-9);
    CHECK(std::abs(m.skew_moment) < 1e-7);
    CHECK(m.leakage < 1e-6);
    double sum = 0;
    for (double v : m.h_y) sum += v;
    CHECK(sum == doctest::Approx(m.norm));

    const auto rev = packet_metrics(g, d, 15, 50, 1.26, -1);
    CHECK(rev.y_offset_mean == doctest::Approx(-5.0).epsilon(1e-9));
    CHECK(rev.leakage > 0.9);
}

TEST_CASE("a one-sided exponential tail has positive quantile skew") {
    const auto g = LatticeGeometry::make(5, 80, Boundary::open, Boundary::open);
    std::vector<double> d(g.sites(), 0.0);
    for (int y = 10; y < 80; ++y) d[g.index(2, y)] = std::exp(-(y - 10) / 8.0);
    const auto m = packet_metrics(g, d, 2, 10, 1.26);
    CHECK(m.skew_kelly > 0.2);
    CHECK(m.skew_bowley > 0.1);
    CHECK(m.skew_moment > 1.5);
}

TEST_CASE("beam-splitter sectors partition the density") {
    const auto g = LatticeGeometry::make(21, 21, Boundary::open, Boundary::open);
    std::vector<double> d(g.sites(), 0.0);
    d[g.index(5, 15)] = 0.4;   // NW
    d[g.index(16, 3)] = 0.3;   // SE
    d[g.index(16, 16)] = 0.1;  // back
    d[g.index(10, 10)] = 0.05; // dead zone
    d[g.index(10, 18)] = 0.02; // on an axis
    const auto r = split_weights(g, d, 10, 10, 2.5);
    CHECK(r.NW == doctest::Approx(0.4));
    CHECK(r.SE == doctest::Approx(0.3));
    CHECK(r.back == doctest::Approx(0.1));
    CHECK(r.residual == doctest::Approx(0.07));
    CHECK(r.NW + r.SE + r.back + r.residual == doctest::Approx(r.photon_norm).epsilon(1e-15));
}

TEST_CASE("emitter resolution") {
    const auto lat = build_lattice(linear_setup(21, 30, Boundary::periodic, 0.1));
    const auto& p = lat.params;
    EmitterPlacement a{10, 5};
    a.g_factor = 0.5;
    EmitterPlacement b{10, 20};
    b.resonance_from = 0;
    b.detuning = 0.01;
    EmitterPlacement c{12, 20};
    c.reference = ResonanceRef::channel;
    c.g = 0.2;
    EmitterPlacement d{3, 3};
    d.reference = ResonanceRef::absolute;
    d.detuning = -2.5;
    const auto r = resolve_emitters(lat, {a, b, c, d});
    CHECK(r[0].emitter.g == doctest::Approx(0.5 * p.U_B / std::sqrt(0.1)).epsilon(1e-12));
    CHECK(std::abs(r[0].lattice_resonance - p.omega_ch(10)) < p.omega_B / 2);
    CHECK(r[0].emitter.omega == r[0].lattice_resonance);
    CHECK(r[1].emitter.omega == doctest::Approx(r[0].emitter.omega + 0.01).epsilon(1e-14));
    CHECK(r[2].emitter.omega == doctest::Approx(p.omega_ch(12)).epsilon(1e-12));
    CHECK(r[2].emitter.g == 0.2);
    CHECK(r[3].emitter.omega == -2.5);
    CHECK(r[0].U_B_local == doctest::Approx(p.U_B).epsilon(1e-12));
    CHECK(r[0].gamma_e == doctest::Approx(markov_rate(r[0].emitter.g, 0.1, p.U_B, 0.0)).epsilon(1e-12));
    CHECK(r[0].regime.regime == Regime::critical);
    EmitterPlacement bad{1, 1};
    bad.resonance_from = 3;
    CHECK_THROWS_AS(resolve_emitters(lat, {a, bad}), ConfigError);
}

TEST_CASE("lattice resonance sits near the channel line") {
    const auto lat = build_lattice(linear_setup(31, 40, Boundary::periodic, 0.1));
    for (int x : {8, 15, 22}) {
        const double w = lattice_resonance(lat, x, 10, lat.params.omega_ch(x));
        CHECK(std::abs(w - lat.params.omega_ch(x)) < 0.1 * lat.params.U_B + 0.01);
    }
}

TEST_CASE("transfer criteria on a linear ramp and on mismatched gradients") {
    const auto lat = build_lattice(linear_setup(21, 21, Boundary::open, 0.1));
    EmitterPlacement a{10, 3}, b{10, 16};
    b.resonance_from = 0;
    const auto em = resolve_emitters(lat, {a, b});
    const auto cr = check_transfer_criteria(lat.potential, em, 0.1);
    CHECK(cr.resonance);
    CHECK(cr.coupling);
    CHECK(cr.gradient);
    CHECK(cr.connected);
    CHECK(cr.all());

    // different columns sit on different equipotentials
    EmitterPlacement far{16, 16};
    const auto em2 = resolve_emitters(lat, {a, far});
    const auto cr2 = check_transfer_criteria(lat.potential, em2, 0.1);
    CHECK_FALSE(cr2.connected);
    CHECK_FALSE(cr2.resonance);

    // a kinked ramp: steeper for y > 10
    const auto g = lat.h.geometry;
    GridPotential kink;
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x) kink.values.push_back(-(y > 10 ? 0.25 : 0.1) * (x - 10));
    LatticeSetup s;
    s.geometry = g;
    s.potential = PotentialSpec{kink};
    const auto lk = build_lattice(s);
    const auto em3 = resolve_emitters(lk, {a, b});
    const auto cr3 = check_transfer_criteria(lk.potential, em3, 0.1);
    CHECK(cr3.connected);
    CHECK_FALSE(cr3.gradient);
    CHECK(cr3.gradient_margin == doctest::Approx(0.15 / 0.175).epsilon(1e-9));
}

TEST_CASE("band connectivity") {
    const auto g = LatticeGeometry::make(21, 21, Boundary::open, Boundary::open);
    const auto v = build_potential(g, PotentialSpec{LinearPotential{0.1}});
    const auto f = local_field(v, 0.1, 10, 3);
    CHECK(equipotential_connected(v, 0.1, 10, 3, 10, 17, f.omega_ch_tilde, 0.5 * f.U_B_tilde));
    CHECK_FALSE(equipotential_connected(v, 0.1, 10, 3, 13, 17, f.omega_ch_tilde, 0.5 * f.U_B_tilde));
}

TEST_CASE("predicted transfer time") {
    const auto g = LatticeGeometry::make(41, 41, Boundary::open, Boundary::open);
    const auto p = LandauAnalytics::make(0.1, 0.05);
    const double gamma = 0.05;
    CHECK(predicted_transfer_time(g, p, 4, 35, gamma) == doctest::Approx(31 / p.c_H + 2 / gamma));
    CHECK(std::isnan(predicted_transfer_time(g, p, 35, 4, gamma)));
    const auto gp = LatticeGeometry::make(41, 41, Boundary::open, Boundary::periodic);
    CHECK(predicted_transfer_time(gp, p, 35, 4, gamma) == doctest::Approx(10 / p.c_H + 2 / gamma));
}

TEST_CASE("short transfer along a straight channel is efficient") {
    TransferConfig cfg;
    cfg.lattice = linear_setup(21, 21, Boundary::open, 0.1);
    EmitterPlacement a{10, 3}, b{10, 12};
    b.resonance_from = 0;
    cfg.emitters = {a, b};
    cfg.dynamics.T = 200;
    cfg.dynamics.record_stride = 10;
    const auto rep = run_transfer(cfg);
    CHECK(rep.F > 0.8);
    CHECK(rep.t_star > 9 / rep.params.c_H);
    CHECK(rep.criteria.all());
}

TEST_CASE("revival map values are populations") {
    RevivalMapConfig cfg;
    cfg.g_factors = {0.0, 1.0};
    cfg.detunings = {-1.0, 0.0, 1.0};
    cfg.Ly = 100;
    cfg.dt = 0.5;
    const auto grid = revival_map(cfg);
    REQUIRE(grid.values.size() == 6);
    for (double v : grid.values) {
        CHECK(v >= 0);
        CHECK(v <= 1 + 1e-9);
    }
    // uncoupled emitters never leave the excited state
    for (std::size_t c = 0; c < 3; ++c) CHECK(grid.at(0, c) == doctest::Approx(1.0));
    CHECK(grid.at(1, 1) > 0.8);
}

TEST_CASE("disorder sweep is reproducible and independent of the worker count") {
    DisorderSweepConfig cfg;
    cfg.transfer.lattice = linear_setup(13, 13, Boundary::open, 0.1);
    EmitterPlacement a{6, 2}, b{6, 9};
    b.resonance_from = 0;
    cfg.transfer.emitters = {a, b};
    cfg.transfer.dynamics.record_stride = 10;
    cfg.U0s = {0.1};
    cfg.sigmas = {0.0, 0.3};
    cfg.n_dis = 3;
    cfg.base_seed = 99;
    cfg.window_factor = 1.5;
    cfg.jobs = 1;
    const auto a1 = disorder_sweep(cfg);
    cfg.jobs = 3;
    const auto a3 = disorder_sweep(cfg);
    CHECK(a1.values == a3.values);
    CHECK(a1.spread == a3.spread);
    CHECK(a1.ensemble == 3);
    CHECK(a1.spread[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a1.at(0, 1) > a1.at(0, 0));
}

TEST_CASE("capture lag does not depend on the loop length") {
    // continuum channel of length Ly: transit is exactly Ly / c_H, so peak - Ly / c_H is the lag
    const auto p = LandauAnalytics::make(0.1, 0.1);
    const double dt = 0.02, lag = capture_lag(p, p.critical_g(), 0.0, dt);
    CHECK(lag > 0);
    CHECK(lag < 4 / markov_rate(p.critical_g(), p.alpha, p.U_B, 0.0));
    for (double Ly : {21.0, 61.0}) {
        CAPTURE(Ly);
        const double tau = Ly / p.c_H;
        const int steps = static_cast<int>(std::llround(1.5 * tau / dt));
        KernelSpec k;
        k.kind = KernelKind::continuum;
        k.continuum = ContinuumKernel{p, ContinuumMode::finite_ly, Ly};
        k.positions = {{0.0, 0.0}};
        k.table = tabulate_kernel(k, 1, dt, steps, kernels::Exec::serial);
        k.table_dt = dt;
        VolterraProblem pr;
        pr.omega = {p.omega_ch(0.0)};
        pr.g = {p.critical_g()};
        pr.c0 = {1.0};
        pr.dt = dt;
        pr.T = 1.5 * tau;
        const auto res = volterra_solve(k, pr);
        Trajectory tr;
        tr.t = res.t;
        tr.populations = res.populations;
        CHECK(revival_peaks(tr, tau, 1)[0].first - lag == doctest::Approx(tau).epsilon(1e-3));
    }
}
