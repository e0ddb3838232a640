#include "hallwave/run.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace hallwave {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::pair<std::string, double>> summary;
    std::vector<ResolvedEmitter> emitters;
    std::vector<std::string> warnings;
    std::vector<std::string> violations;

    void add(std::string name, std::string bytes) { files.emplace_back(std::move(name), std::move(bytes)); }
    void put(std::string key, double v) { summary.emplace_back(std::move(key), v); }
};

std::string run_id(const RunConfig& cfg) { return sha256_hex(to_json(cfg).dump()).substr(0, 16); }

double num(const json& params, const std::string& key, double fallback) {
    const auto& v = params.at(key);
    return v.is_null() ? fallback : v.get<double>();
}

std::vector<double> nums(const json& params, const std::string& key) { return params.at(key).get<std::vector<double>>(); }

double linear_x0(const PotentialSpec& spec) {
    if (const auto* l = std::get_if<LinearPotential>(&spec.kind)) return l->x0;
    if (const auto* s = std::get_if<SumPotential>(&spec.kind)) {
        for (const auto& t : s->terms) {
            if (std::holds_alternative<LinearPotential>(t.kind)) return linear_x0(t);
        }
    }
    return 0.0;
}

std::string trajectory_csv(const std::vector<double>& t, const std::vector<std::vector<double>>& pops,
                           const std::vector<double>& photon_norm) {
    CsvTable tab;
    tab.header.push_back("t");
    tab.columns.push_back(t);
    for (std::size_t n = 0; n < pops.size(); ++n) {
        tab.header.push_back("P_e_" + std::to_string(n + 1));
        tab.columns.push_back(pops[n]);
    }
    tab.header.push_back("photon_norm");
    tab.columns.push_back(photon_norm);
    return tab.render();
}

void add_trajectory(Artifacts& a, const RunConfig& cfg, const Trajectory& tr) {
    a.add("trajectory.csv", trajectory_csv(tr.t, tr.populations, tr.photon_norm));
    if (!tr.snapshots.empty()) {
        SnapshotStack s{cfg.lattice.geometry.nx, cfg.lattice.geometry.ny, run_id(cfg), {}};
        CsvTable times{{"frame", "t"}, {{}, {}}};
        for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
            s.frames.push_back(tr.snapshots[k].density);
            times.columns[0].push_back(static_cast<double>(k));
            times.columns[1].push_back(tr.snapshots[k].t);
        }
        a.add("snapshots.bin", encode_snapshots(s));
        a.add("snapshot_times.csv", times.render());
    }
    const double norm = tr.final_state.norm();
    a.put("final_norm", norm);
    a.put("dry_run_drift_rate", tr.dry_run_drift_rate);
    const double T = tr.t.empty() ? 0.0 : tr.t.back();
    if (cfg.dynamics.gamma_p == 0 && std::abs(norm - 1.0) > 1e-6 * std::max(1.0, T)) {
        a.violations.push_back("norm drift |N(T) - 1| = " + format_double(std::abs(norm - 1.0)) +
                               " exceeds 1e-6 * max(1, T)");
    }
    if (norm > 1.0 + 1e-6 * std::max(1.0, T)) a.violations.push_back("norm grew above 1 under loss");
}

void add_metrics(Artifacts& a, const std::vector<WavepacketMetrics>& ms) {
    if (ms.empty()) return;
    CsvTable m{{"t", "norm", "x_mean", "y_offset_mean", "sigma_x", "sigma_y", "skew_kelly", "skew_bowley",
                "skew_moment", "leakage"},
               std::vector<std::vector<double>>(10)};
    for (const auto& x : ms) {
        const double row[] = {x.t,       x.norm,       x.x_mean,      x.y_offset_mean, x.sigma_x,
                              x.sigma_y, x.skew_kelly, x.skew_bowley, x.skew_moment,   x.leakage};
        for (int c = 0; c < 10; ++c) m.columns[c].push_back(row[c]);
    }
    a.add("metrics.csv", m.render());
    CsvTable h;
    h.header.push_back("y_offset");
    std::vector<double> off;
    for (std::size_t k = 0; k < ms.front().h_y.size(); ++k) off.push_back(ms.front().offset_lo + static_cast<double>(k));
    h.columns.push_back(off);
    for (std::size_t s = 0; s < ms.size(); ++s) {
        h.header.push_back("h_" + std::to_string(s));
        h.columns.push_back(ms[s].h_y);
    }
    a.add("h_y.csv", h.render());
}

std::string grid_csv(const SweepGrid& g) {
    CsvTable t;
    t.header = {g.row_name, g.col_name, g.value_name};
    if (!g.spread.empty()) t.header.push_back("std");
    t.columns.assign(t.header.size(), {});
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
        for (std::size_t c = 0; c < g.cols.size(); ++c) {
            t.columns[0].push_back(g.rows[r]);
            t.columns[1].push_back(g.cols[c]);
            t.columns[2].push_back(g.at(r, c));
            if (!g.spread.empty()) t.columns[3].push_back(g.spread[r * g.cols.size() + c]);
        }
    }
    return t.render();
}

std::vector<ResolvedEmitter> resolve_for(const BuiltLattice& lat, const RunConfig& cfg, std::size_t min_count) {
    if (cfg.emitters.size() < min_count) {
        throw ConfigError("scenario '" + cfg.scenario + "' needs at least " + std::to_string(min_count) +
                          " emitter(s)");
    }
    return resolve_emitters(lat, cfg.emitters);
}

void require_T(const RunConfig& cfg) {
    if (!(cfg.dynamics.T > 0)) throw ConfigError("scenario '" + cfg.scenario + "' needs dynamics.T > 0");
}

Artifacts do_spectrum(const RunConfig& cfg) {
    Artifacts a;
    const auto lat = build_lattice(cfg.lattice);
    const auto rep = spectrum_report(lat, cfg.params.at("edge_width").get<int>());
    CsvTable t{{"lambda", "omega", "mean_x", "edge_flag"}, std::vector<std::vector<double>>(4)};
    for (int l = 0; l < rep.eig.dim(); ++l) {
        t.columns[0].push_back(l);
        t.columns[1].push_back(rep.eig.omegas[l]);
        t.columns[2].push_back(rep.mean_x[l]);
        t.columns[3].push_back(rep.edge_flag[l]);
    }
    a.add("spectrum.csv", t.render());
    const double x0 = linear_x0(cfg.lattice.potential);
    CsvTable an{{"x", "omega_0", "omega_1"}, std::vector<std::vector<double>>(3)};
    for (double x : linspace(0, cfg.lattice.geometry.nx - 1, 4 * cfg.lattice.geometry.nx - 3)) {
        an.columns[0].push_back(x);
        an.columns[1].push_back(analytic_spectrum_x(lat.params, 0, x - x0));
        an.columns[2].push_back(analytic_spectrum_x(lat.params, 1, x - x0));
    }
    a.add("analytic.csv", an.render());
    a.put("modes", rep.eig.dim());
    a.put("lll_bulk_modes", rep.lll_bulk_modes);
    a.put("lll_max_deviation", rep.lll_max_deviation);
    a.put("lll_mean_deviation", rep.lll_mean_deviation);
    a.put("max_residual", rep.eig.max_residual(lat.h.matrix));
    a.put("hermiticity_defect", lat.h.matrix.hermiticity_defect());
    if (lat.h.matrix.hermiticity_defect() != 0.0) a.violations.push_back("Hamiltonian not exactly Hermitian");
    return a;
}

Artifacts do_ldos(const RunConfig& cfg) {
    Artifacts a;
    const auto lat = build_lattice(cfg.lattice);
    const auto& g = cfg.lattice.geometry;
    const int x = cfg.params.at("x").get<int>(), y = cfg.params.at("y").get<int>();
    if (!g.contains(x, y)) throw ConfigError("ldos site outside the lattice");
    const auto [vmin, vmax] = std::minmax_element(lat.potential.values.begin(), lat.potential.values.end());
    const double lo = num(cfg.params, "omega_min", *vmin - 4.5), hi = num(cfg.params, "omega_max", *vmax + 4.5);
    const int points = cfg.params.at("points").get<int>();
    const double gamma = cfg.params.at("gamma").get<double>();
    const int ell = cfg.params.at("analytic_ell").get<int>();
    const auto grid = linspace(lo, hi, points);
    const auto spec = local_spectrum(lat.h, g.index(x, y));
    const auto prof = ldos_numeric(spec, g.index(x, y), grid, gamma, cfg.dynamics.exec);
    const auto an = ldos_analytic(lat.params, x - linear_x0(cfg.lattice.potential), ell, grid);
    a.add("ldos.csv", CsvTable{{"omega", "value", "analytic"}, {grid, prof.values, an}}.render());
    const double integral = trapezoid(grid, prof.values) / (2.0 * std::numbers::pi);
    a.put("integral_over_2pi", integral);
    double outside = 0;
    for (std::size_t k = 0; k < spec.omegas.size(); ++k) {
        if (spec.omegas[k] < lo || spec.omegas[k] > hi) outside += spec.weights[k];
    }
    if (outside > 1e-3) a.warnings.push_back("LDOS grid misses spectral weight " + format_double(outside));
    if (std::abs(integral - 1.0) > 0.05) {
        a.warnings.push_back("LDOS integral " + format_double(integral) + " differs from 1 (grid or broadening)");
    }
    return a;
}

Artifacts do_greens(const RunConfig& cfg) {
    Artifacts a;
    const auto lat = build_lattice(cfg.lattice);
    const auto& g = cfg.lattice.geometry;
    const auto from = cfg.params.at("from").get<std::vector<int>>();
    const auto to = cfg.params.at("to").get<std::vector<int>>();
    if (from.size() != 2 || to.size() != 2 || !g.contains(from[0], from[1]) || !g.contains(to[0], to[1])) {
        throw ConfigError("greens 'from'/'to' must be [x, y] sites on the lattice");
    }
    const auto times = linspace(0, cfg.params.at("t_max").get<double>(), cfg.params.at("points").get<int>());
    const auto model = cfg.params.at("model").get<std::string>();
    const auto map_times = nums(cfg.params, "map_times");
    const double x0 = linear_x0(cfg.lattice.potential);
    const int j = g.index(from[0], from[1]), i = g.index(to[0], to[1]);
    std::vector<cplx> G;
    SnapshotStack maps{g.nx, g.ny, run_id(cfg), {}};
    if (model == "exact") {
        const auto eig = diagonalize(lat.h);
        G = greens_exact_series(eig, i, j, times, cfg.dynamics.exec);
        for (double t : map_times) {
            std::vector<double> f(g.sites());
            for (int s = 0; s < g.sites(); ++s) f[s] = std::abs(greens_exact(eig, t, s, j));
            maps.frames.push_back(std::move(f));
        }
    } else if (model == "continuum_finite" || model == "continuum_infinite") {
        const auto mode = model == "continuum_finite" ? ContinuumMode::finite_ly : ContinuumMode::infinite;
        const ContinuumKernel k{lat.params, mode, static_cast<double>(g.ny)};
        auto eval = [&](double t, int s) {
            return k(t, g.x_of(s) - x0, g.y_of(s), from[0] - x0, from[1]);
        };
        for (double t : times) G.push_back(eval(t, i));
        for (double t : map_times) {
            std::vector<double> f(g.sites());
            for (int s = 0; s < g.sites(); ++s) f[s] = std::abs(eval(t, s));
            maps.frames.push_back(std::move(f));
        }
    } else {
        throw ConfigError("greens model '" + model + "' (expected exact|continuum_finite|continuum_infinite)");
    }
    CsvTable t{{"t", "re", "im"}, {times, {}, {}}};
    for (const auto& z : G) {
        t.columns[1].push_back(z.real());
        t.columns[2].push_back(z.imag());
    }
    a.add("greens.csv", t.render());
    if (!maps.frames.empty()) {
        a.add("greens_map.bin", encode_snapshots(maps));
        a.add("greens_map_times.csv", CsvTable{{"frame", "t"}, {linspace(0, map_times.size() - 1.0, map_times.size()),
                                                                  map_times}}.render());
    }
    return a;
}

Artifacts do_evolve(const RunConfig& cfg) {
    require_T(cfg);
    Artifacts a;
    const auto lat = build_lattice(cfg.lattice);
    a.emitters = resolve_for(lat, cfg, 1);
    const int excite = cfg.params.at("excite").get<int>();
    if (excite < 0 || excite >= static_cast<int>(a.emitters.size())) throw ConfigError("params.excite out of range");
    const auto set = to_emitter_set(a.emitters);
    a.warnings = set.validate(cfg.lattice.geometry);
    const auto h = build_coupled_hamiltonian(lat.h, set);
    EvolveOptions o;
    o.dt = cfg.dynamics.dt;
    o.T = cfg.dynamics.T;
    o.gamma_p = cfg.dynamics.gamma_p;
    o.snapshot_times = cfg.dynamics.snapshot_times;
    o.record_stride = cfg.dynamics.record_stride;
    o.validate = cfg.dynamics.validate;
    o.exec = cfg.dynamics.exec;
    const auto tr = evolve(h, QuantumState::excited_emitter(h, excite), o);
    add_trajectory(a, cfg, tr);
    return a;
}

Artifacts do_kernel(const RunConfig& cfg) {
    require_T(cfg);
    Artifacts a;
    const auto lat = build_lattice(cfg.lattice);
    a.emitters = resolve_for(lat, cfg, 1);
    const auto& g = cfg.lattice.geometry;
    const auto model = cfg.params.at("model").get<std::string>();
    const double x0 = linear_x0(cfg.lattice.potential);
    KernelSpec k;
    VolterraProblem pr;
    pr.dt = cfg.dynamics.dt;
    pr.T = cfg.dynamics.T;
    pr.exec = cfg.dynamics.exec;
    std::optional<EigenDecomposition> eig;
    for (std::size_t n = 0; n < a.emitters.size(); ++n) {
        const auto& r = a.emitters[n];
        pr.omega.push_back(r.emitter.omega);
        pr.g.push_back(r.emitter.g);
        pr.c0.push_back(n == 0 ? 1.0 : 0.0);
    }
    if (model == "exact") {
        k.kind = KernelKind::exact;
        eig = diagonalize(lat.h);
        k.eig = &*eig;
        for (const auto& r : a.emitters) k.sites.push_back(g.index(r.emitter.x, r.emitter.y));
    } else if (model == "continuum") {
        k.kind = KernelKind::continuum;
        const double Ly = num(cfg.params, "Ly", g.ny);
        k.continuum = ContinuumKernel{lat.params, g.bc_y == Boundary::periodic ? ContinuumMode::finite_ly
                                                                               : ContinuumMode::infinite,
                                      Ly};
        for (const auto& r : a.emitters) k.positions.emplace_back(r.emitter.x - x0, r.emitter.y);
    } else if (model == "gaussian_lll") {
        k.kind = KernelKind::gaussian_lll;
        k.params = lat.params;
        for (std::size_t n = 0; n < a.emitters.size(); ++n) {
            const auto& r = a.emitters[n];
            const double ref = std::isnan(r.lattice_resonance) ? r.channel_frequency : r.lattice_resonance;
            pr.omega[n] = r.emitter.omega - ref;
        }
    } else if (model == "flat_markov") {
        k.kind = KernelKind::flat_markov;
        for (const auto& r : a.emitters) k.rates.push_back(0.5 * r.gamma_e);
    } else {
        throw ConfigError("kernel model '" + model + "' (expected exact|continuum|gaussian_lll|flat_markov)");
    }
    const auto res = volterra_solve(k, pr);
    std::vector<double> photon(res.t.size(), 0.0);
    for (std::size_t s = 0; s < res.t.size(); ++s) {
        double p = 1.0;
        for (const auto& pop : res.populations) p -= pop[s];
        photon[s] = p;
    }
    a.add("trajectory.csv", trajectory_csv(res.t, res.populations, photon));
    a.put("kernel_" + model, 1);
    return a;
}

Artifacts from_emission(const RunConfig& cfg, const EmissionResult& em) {
    Artifacts a;
    a.emitters = {em.emitter};
    a.warnings = em.warnings;
    add_trajectory(a, cfg, em.trajectory);
    add_metrics(a, em.metrics);
    return a;
}

Artifacts do_emission(const RunConfig& cfg) {
    require_T(cfg);
    const auto em = run_emission(to_emission_config(cfg));
    auto a = from_emission(cfg, em);
    const double ge = em.emitter.gamma_e;
    const double t0 = num(cfg.params, "fit_t0", std::isnan(ge) ? 0.0 : 1.0 / (2.0 * ge));
    const double t1 = num(cfg.params, "fit_t1", std::isnan(ge) ? cfg.dynamics.T : 3.0 / (2.0 * ge));
    const double rate = fit_decay_rate(em.trajectory.t, em.trajectory.populations[0], t0, t1);
    a.put("gamma_e_formula", ge);
    a.put("fit_population_rate", rate);
    a.put("fit_amplitude_rate", 0.5 * rate);
    a.put("fit_t0", t0);
    a.put("fit_t1", t1);
    double pmax = 0;
    for (std::size_t k = 1; k < em.trajectory.t.size(); ++k) pmax = std::max(pmax, em.trajectory.populations[0][k]);
    a.put("P_e_max_after_start", pmax);
    return a;
}

Artifacts do_revival(const RunConfig& cfg) {
    require_T(cfg);
    const auto rep = run_revival(to_emission_config(cfg));
    auto a = from_emission(cfg, rep.emission);
    a.put("P_rev", rep.P_rev);
    a.put("t_peak", rep.t_peak);
    a.put("capture_lag", rep.capture_lag);
    a.put("tau_rev_measured", rep.tau_rev_measured);
    a.put("tau_rev_predicted", rep.tau_rev_predicted);
    const int peaks = cfg.params.at("peaks").get<int>();
    const auto pk = revival_peaks(rep.emission.trajectory, rep.tau_rev_predicted, peaks);
    for (std::size_t n = 0; n < pk.size(); ++n) {
        if (std::isnan(pk[n].first)) continue;
        a.put("peak_" + std::to_string(n + 1) + "_t", pk[n].first);
        a.put("peak_" + std::to_string(n + 1) + "_P", pk[n].second);
    }
    return a;
}

Artifacts do_obc_loop(const RunConfig& cfg) {
    require_T(cfg);
    std::optional<double> tau;
    if (!cfg.params.at("tau").is_null()) tau = cfg.params.at("tau").get<double>();
    const auto rep = run_loop_revival(to_emission_config(cfg), tau);
    auto a = from_emission(cfg, rep.emission);
    a.put("P_rev", rep.P_rev);
    a.put("t_peak", rep.t_peak);
    a.put("capture_lag", rep.capture_lag);
    a.put("tau_rev_measured", rep.tau_rev_measured);
    a.put("tau_rev_predicted", rep.tau_rev_predicted);
    return a;
}

Artifacts do_transfer(const RunConfig& cfg) {
    require_T(cfg);
    const auto tc = to_transfer_config(cfg);
    const auto lat = build_lattice(tc.lattice);
    const auto rep = run_transfer(lat, resolve_emitters(lat, tc.emitters), tc);
    Artifacts a;
    a.emitters = rep.emitters;
    a.warnings = to_emitter_set(rep.emitters).validate(cfg.lattice.geometry);
    add_trajectory(a, cfg, rep.trajectory);
    a.put("F", rep.F);
    a.put("t_star", rep.t_star);
    a.put("tau_T", rep.tau_T);
    a.put("criterion_resonance", rep.criteria.resonance);
    a.put("criterion_coupling", rep.criteria.coupling);
    a.put("criterion_gradient", rep.criteria.gradient);
    a.put("equipotential_connected", rep.criteria.connected);
    a.put("resonance_margin", rep.criteria.resonance_margin);
    a.put("coupling_margin", rep.criteria.coupling_margin);
    a.put("gradient_margin", rep.criteria.gradient_margin);
    if (cfg.dynamics.gamma_p > 0) a.put("loss_factor_at_t_star", std::exp(-cfg.dynamics.gamma_p * rep.t_star));
    return a;
}

Artifacts do_revival_map(const RunConfig& cfg) {
    Artifacts a;
    const auto grid = revival_map(to_revival_map_config(cfg));
    a.add("grid.csv", grid_csv(grid));
    a.put("max_P_rev", *std::max_element(grid.values.begin(), grid.values.end()));
    return a;
}

Artifacts do_disorder(const RunConfig& cfg, int jobs) {
    Artifacts a;
    const auto grid = disorder_sweep(to_disorder_config(cfg, jobs));
    a.add("grid.csv", grid_csv(grid));
    a.put("ensemble", grid.ensemble);
    a.put("base_seed", static_cast<double>(grid.base_seed));
    return a;
}

Artifacts do_beam_splitter(const RunConfig& cfg) {
    require_T(cfg);
    const auto rep = run_beam_splitter(to_beam_splitter_config(cfg));
    auto a = from_emission(cfg, rep.emission);
    a.put("t", rep.t);
    a.put("NW", rep.NW);
    a.put("SE", rep.SE);
    a.put("back", rep.back);
    a.put("residual", rep.residual);
    a.put("photon_norm", rep.photon_norm);
    a.put("skew_NW", rep.skew_NW);
    a.put("skew_SE", rep.skew_SE);
    const double parts = rep.NW + rep.SE + rep.back + rep.residual;
    if (std::abs(parts - rep.photon_norm) > 1e-9) a.violations.push_back("beam-splitter sectors do not partition");
    return a;
}

Artifacts do_excitation_spectrum(const RunConfig& cfg) {
    Artifacts a;
    const auto m = excitation_map(cfg);
    CsvTable t{{"U0", "g", "omega", "S_e"}, std::vector<std::vector<double>>(4)};
    const std::size_t ng = m.g.size() / m.U0s.size(), nw = m.omega.size() / m.U0s.size();
    for (std::size_t u = 0; u < m.U0s.size(); ++u) {
        for (std::size_t i = 0; i < ng; ++i) {
            for (std::size_t w = 0; w < nw; ++w) {
                t.columns[0].push_back(m.U0s[u]);
                t.columns[1].push_back(m.g[u * ng + i]);
                t.columns[2].push_back(m.omega[u * nw + w]);
                t.columns[3].push_back(m.S[(u * ng + i) * nw + w]);
            }
        }
    }
    a.add("grid.csv", t.render());
    return a;
}

json emitter_json(const ResolvedEmitter& r) {
    const double ref = std::isnan(r.lattice_resonance) ? r.channel_frequency : r.lattice_resonance;
    json e{{"x", r.emitter.x},
           {"y", r.emitter.y},
           {"omega", r.emitter.omega},
           {"g", r.emitter.g},
           {"U_B_local", r.U_B_local},
           {"channel_frequency", r.channel_frequency},
           {"lattice_resonance", r.lattice_resonance},
           {"delta", r.emitter.omega - ref},
           {"gamma_e", r.gamma_e},
           {"regime", to_string(r.regime.regime)},
           {"regime_ratio", r.regime.ratio}};
    return e;
}

}  // namespace

SpectrumReport spectrum_report(const BuiltLattice& lat, int edge_width, double margin, double window) {
    SpectrumReport r;
    const auto& g = lat.h.geometry;
    r.eig = diagonalize(lat.h);
    const int n = r.eig.dim();
    r.mean_x.resize(n);
    r.edge_flag.resize(n);
    double sum = 0;
    for (int l = 0; l < n; ++l) {
        const auto mode = r.eig.modes.col(l);
        r.mean_x[l] = mode_center_x(g, mode);
        double edge = 0;
        for (int i = 0; i < g.sites(); ++i) {
            const int x = g.x_of(i), y = g.y_of(i);
            const bool near = (g.bc_x == Boundary::open && (x < edge_width || x >= g.nx - edge_width)) ||
                              (g.bc_y == Boundary::open && (y < edge_width || y >= g.ny - edge_width));
            if (near) edge += std::norm(mode[i]);
        }
        r.edge_flag[l] = edge > 0.5 ? 1 : 0;
        const double mx = r.mean_x[l];
        if (mx <= margin || mx >= g.nx - 1 - margin) continue;
        const double d = r.eig.omegas[l] - analytic_spectrum_x(lat.params, 0, mx);
        if (std::abs(d) >= window) continue;
        ++r.lll_bulk_modes;
        r.lll_max_deviation = std::max(r.lll_max_deviation, std::abs(d));
        sum += std::abs(d);
    }
    r.lll_mean_deviation = r.lll_bulk_modes ? sum / r.lll_bulk_modes : kNaN;
    return r;
}

ExcitationMap excitation_map(const RunConfig& cfg) {
    if (cfg.emitters.size() != 1) throw ConfigError("excitation_spectrum needs exactly one emitter");
    ExcitationMap m;
    m.U0s = nums(cfg.params, "U0s");
    const auto gf = nums(cfg.params, "g_factors");
    const int points = cfg.params.at("points").get<int>();
    const double gamma = cfg.params.at("gamma").get<double>();
    for (double U0 : m.U0s) {
        LatticeSetup setup = cfg.lattice;
        setup.potential = PotentialSpec{LinearPotential{U0, linear_x0(cfg.lattice.potential)}};
        const auto lat = build_lattice(setup);
        auto placement = cfg.emitters.front();
        placement.g = 0.0;
        const auto base = resolve_emitters(lat, {placement}).front();
        const double gmax = *std::max_element(gf.begin(), gf.end()) * lat.params.critical_g();
        const double half = 0.5 * gmax * std::sqrt(lat.params.alpha) + lat.params.omega_B;
        const double lo = num(cfg.params, "omega_min", base.emitter.omega - half);
        const double hi = num(cfg.params, "omega_max", base.emitter.omega + half);
        const auto grid = linspace(lo, hi, points);
        m.omega.insert(m.omega.end(), grid.begin(), grid.end());
        for (double f : gf) {
            auto e = base.emitter;
            e.g = f * lat.params.critical_g();
            m.g.push_back(e.g);
            const auto h = build_coupled_hamiltonian(lat.h, EmitterSet{{e}});
            const auto eig = diagonalize(h.matrix);
            const auto s = excitation_spectrum(eig, h.emitter_row(0), grid, gamma, cfg.dynamics.exec);
            m.S.insert(m.S.end(), s.S.begin(), s.S.end());
        }
    }
    return m;
}

EmissionConfig to_emission_config(const RunConfig& cfg) {
    if (cfg.emitters.size() != 1) throw ConfigError("scenario '" + cfg.scenario + "' needs exactly one emitter");
    return EmissionConfig{cfg.lattice, cfg.emitters.front(), cfg.dynamics};
}

TransferConfig to_transfer_config(const RunConfig& cfg) {
    if (cfg.emitters.size() != 2) throw ConfigError("transfer needs exactly two emitters");
    TransferConfig t{cfg.lattice, cfg.emitters, cfg.dynamics, 0.0, std::nullopt};
    if (cfg.params.contains("scan_t0")) t.scan_t0 = num(cfg.params, "scan_t0", 0.0);
    if (cfg.params.contains("scan_t1") && !cfg.params.at("scan_t1").is_null()) {
        t.scan_t1 = cfg.params.at("scan_t1").get<double>();
    }
    return t;
}

RevivalMapConfig to_revival_map_config(const RunConfig& cfg) {
    RevivalMapConfig r;
    r.alpha = cfg.lattice.alpha;
    r.U0 = cfg.params.at("U0").get<double>();
    r.Ly = cfg.params.at("Ly").get<double>();
    r.g_factors = nums(cfg.params, "g_factors");
    r.detunings = nums(cfg.params, "detunings");
    r.dt = cfg.params.at("dt").get<double>();
    r.exec = cfg.dynamics.exec;
    return r;
}

DisorderSweepConfig to_disorder_config(const RunConfig& cfg, int jobs) {
    if (cfg.emitters.size() != 2) throw ConfigError("disorder sweep needs exactly two emitters");
    DisorderSweepConfig d;
    d.transfer = TransferConfig{cfg.lattice, cfg.emitters, cfg.dynamics, 0.0, std::nullopt};
    d.U0s = nums(cfg.params, "U0s");
    d.sigmas = nums(cfg.params, "sigmas");
    d.n_dis = cfg.params.at("n_dis").get<int>();
    d.window_factor = cfg.params.at("window_factor").get<double>();
    d.base_seed = cfg.seed;
    d.jobs = jobs;
    return d;
}

BeamSplitterConfig to_beam_splitter_config(const RunConfig& cfg) {
    if (cfg.emitters.size() != 1) throw ConfigError("beam_splitter needs exactly one emitter");
    BeamSplitterConfig b;
    b.lattice = cfg.lattice;
    b.cx = cfg.params.at("cx").get<double>();
    b.cy = cfg.params.at("cy").get<double>();
    b.emitter = cfg.emitters.front();
    b.dynamics = cfg.dynamics;
    return b;
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec || !fs::is_directory(opt.out_dir)) {
        throw OutputError("cannot create output directory " + opt.out_dir.string());
    }

    Artifacts a;
    try {
        const auto& s = cfg.scenario;
        if (s == "spectrum") a = do_spectrum(cfg);
        else if (s == "ldos") a = do_ldos(cfg);
        else if (s == "greens") a = do_greens(cfg);
        else if (s == "evolve") a = do_evolve(cfg);
        else if (s == "kernel") a = do_kernel(cfg);
        else if (s == "emission") a = do_emission(cfg);
        else if (s == "revival") a = do_revival(cfg);
        else if (s == "obc_loop") a = do_obc_loop(cfg);
        else if (s == "transfer") a = do_transfer(cfg);
        else if (s == "revival_map") a = do_revival_map(cfg);
        else if (s == "disorder") a = do_disorder(cfg, opt.jobs);
        else if (s == "beam_splitter") a = do_beam_splitter(cfg);
        else if (s == "excitation_spectrum") a = do_excitation_spectrum(cfg);
        else throw ConfigError("no runner for scenario '" + s + "'");
    } catch (const std::exception& e) {
        throw std::runtime_error("scenario '" + cfg.scenario + "' (" + cfg.name + ") failed: " + e.what());
    }

    a.add("summary.csv", render_summary(a.summary));

    json m;
    m["artifact_version"] = kArtifactVersion;
    m["run_id"] = run_id(cfg);
    m["config"] = to_json(cfg);
    m["defaults_applied"] = cfg.defaults_applied;
    m["derived"] = derived_quantities(cfg);
    json ems = json::array();
    for (const auto& r : a.emitters) ems.push_back(emitter_json(r));
    m["derived"]["emitters"] = ems;
    m["seeds"] = {{"base", cfg.seed},
                  {"derivation", "splitmix64(splitmix64(base ^ splitmix64(stream)) + counter), mt19937_64"}};
    m["warnings"] = a.warnings;
    m["violations"] = a.violations;
    json files = json::array();
    for (const auto& [name, bytes] : a.files) {
        write_file_atomic(opt.out_dir / name, bytes);
        files.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    }
    m["files"] = files;
    m["threads"] = kernels::max_threads();
    m["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file_atomic(opt.out_dir / "manifest.json", m.dump(2) + "\n");
    return RunOutcome{m, a.violations};
}

}  // namespace hallwave
