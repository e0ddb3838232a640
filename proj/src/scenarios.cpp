#include "hallwave/scenarios.hpp"

#include "hallwave/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>

namespace hallwave {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double linear_U0(const PotentialSpec& spec) {
    if (const auto* l = std::get_if<LinearPotential>(&spec.kind)) return l->U0;
    if (const auto* s = std::get_if<SumPotential>(&spec.kind)) {
        double u = 0;
        for (const auto& t : s->terms) u += linear_U0(t);
        return u;
    }
    return 0.0;
}

BuiltLattice build_lattice(const LatticeSetup& setup) {
    BuiltLattice b;
    b.gauge = build_gauge(setup.geometry, setup.alpha);
    b.potential = build_potential(setup.geometry, setup.potential, setup.seed);
    b.h = assemble_hamiltonian(setup.geometry, b.gauge, b.potential);
    b.params = LandauAnalytics::make(setup.alpha, linear_U0(setup.potential));
    return b;
}

const char* to_string(ResonanceRef r) {
    switch (r) {
        case ResonanceRef::lattice: return "lattice";
        case ResonanceRef::channel: return "channel";
        case ResonanceRef::absolute: return "absolute";
    }
    return "?";
}

ResonanceRef resonance_ref_from_string(const std::string& s) {
    if (s == "lattice") return ResonanceRef::lattice;
    if (s == "channel") return ResonanceRef::channel;
    if (s == "absolute") return ResonanceRef::absolute;
    throw ConfigError("unknown resonance reference '" + s + "' (expected lattice|channel|absolute)");
}

double lattice_resonance(const BuiltLattice& lat, int x, int y, double center) {
    const auto s = local_spectrum(lat.h, lat.h.geometry.index(x, y));
    return ldos_centroid(s, center, 0.5 * lat.params.omega_B);
}

namespace {

// Local field with a fallback for sites on open edges: the linear part of the potential
// supplies the gradient there.
LocalField field_or_edge(const BuiltLattice& lat, int x, int y) {
    try {
        return local_field(lat.potential, lat.params.alpha, x, y);
    } catch (const std::domain_error&) {
        const auto& p = lat.params;
        LocalField f;
        f.V = lat.potential.at(x, y);
        f.grad_x = -p.U0;
        f.grad_norm = std::abs(p.U0);
        f.U_B_tilde = f.grad_norm * p.l_B;
        f.omega_ch_tilde = p.level(0) + f.V + f.U_B_tilde * f.U_B_tilde / (2.0 * p.omega_B);
        f.speed = f.grad_norm * p.l_B * p.l_B;
        return f;
    }
}

}  // namespace

std::vector<ResolvedEmitter> resolve_emitters(const BuiltLattice& lat, const std::vector<EmitterPlacement>& placements) {
    const auto& g = lat.h.geometry;
    const double alpha = lat.params.alpha;
    std::optional<EigenDecomposition> eig;
    auto local = [&](int site) {
        if (ky_block_eligible(lat.h)) return local_spectrum(lat.h, site);
        if (!eig) eig = diagonalize(lat.h);
        return local_spectrum(*eig, site);
    };

    std::vector<ResolvedEmitter> out;
    for (std::size_t n = 0; n < placements.size(); ++n) {
        const auto& p = placements[n];
        if (!g.contains(p.x, p.y)) {
            throw ConfigError("emitter " + std::to_string(n) + " placed off the lattice");
        }
        ResolvedEmitter r;
        const auto f = field_or_edge(lat, p.x, p.y);
        r.emitter.x = p.x;
        r.emitter.y = p.y;
        r.channel_frequency = f.omega_ch_tilde;
        r.U_B_local = f.U_B_tilde;
        r.lattice_resonance = kNaN;
        double anchor = r.channel_frequency;
        if (p.resonance_from) {
            const int src = *p.resonance_from;
            if (src < 0 || src >= static_cast<int>(n)) throw ConfigError("resonance_from must name an earlier emitter");
            r.lattice_resonance = out[src].lattice_resonance;
            anchor = out[src].emitter.omega;
            r.emitter.omega = anchor + p.detuning;
        } else {
            switch (p.reference) {
                case ResonanceRef::lattice:
                    r.lattice_resonance =
                        ldos_centroid(local(g.index(p.x, p.y)), r.channel_frequency, 0.5 * lat.params.omega_B);
                    anchor = r.lattice_resonance;
                    break;
                case ResonanceRef::channel: break;
                case ResonanceRef::absolute: anchor = 0.0; break;
            }
            r.emitter.omega = anchor + p.detuning;
        }
        if (p.g) r.emitter.g = *p.g;
        else r.emitter.g = p.g_factor * r.U_B_local / std::sqrt(alpha);
        if (r.U_B_local > 0) {
            const double ref = std::isnan(r.lattice_resonance) ? r.channel_frequency : r.lattice_resonance;
            r.gamma_e = markov_rate(r.emitter.g, alpha, r.U_B_local, r.emitter.omega - ref);
            r.regime = classify_regime(r.emitter.g, alpha, r.U_B_local);
        } else {
            r.gamma_e = kNaN;
            r.regime = RegimeInfo{Regime::strong, std::numeric_limits<double>::infinity()};
        }
        out.push_back(r);
    }
    return out;
}

EmitterSet to_emitter_set(const std::vector<ResolvedEmitter>& r) {
    EmitterSet s;
    for (const auto& e : r) s.list.push_back(e.emitter);
    return s;
}

double histogram_quantile(const std::vector<double>& h, int lo, double q) {
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    if (!(total > 0)) return kNaN;
    const double target = q * total;
    double cum = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k] > 0 && cum + h[k] >= target) {
            const double frac = (target - cum) / h[k];
            return lo + static_cast<double>(k) - 0.5 + frac;
        }
        cum += h[k];
    }
    return lo + static_cast<double>(h.size()) - 0.5;
}

namespace {

double quantile_skew(double lo, double mid, double hi) {
    const double d = hi - lo;
    return d > 0 ? (hi + lo - 2.0 * mid) / d : 0.0;
}

// Kelly skewness of weighted samples binned at unit spacing, with interpolated quantiles.
double weighted_kelly(const std::vector<std::pair<double, double>>& s) {
    if (s.empty()) return kNaN;
    double lo = s.front().first, hi = lo;
    for (const auto& [x, w] : s) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const int base = static_cast<int>(std::floor(lo + 0.5));
    std::vector<double> h(static_cast<std::size_t>(std::floor(hi + 0.5)) - base + 1, 0.0);
    for (const auto& [x, w] : s) h[static_cast<int>(std::floor(x + 0.5)) - base] += w;
    return quantile_skew(histogram_quantile(h, base, 0.1), histogram_quantile(h, base, 0.5),
                         histogram_quantile(h, base, 0.9));
}

}  // namespace

WavepacketMetrics packet_metrics(const LatticeGeometry& g, const std::vector<double>& density, [[maybe_unused]] int x_e, int y_e,
                                 double l_B, int direction) {
    WavepacketMetrics m;
    const int dir = direction >= 0 ? 1 : -1;
    const bool periodic = g.bc_y == Boundary::periodic;
    const int quarter = g.ny / 4;
    auto offset = [&](int y) {
        int o = dir * (y - y_e);
        if (periodic) o = ((o + quarter) % g.ny + g.ny) % g.ny - quarter;
        return o;
    };
    if (periodic) m.offset_lo = -quarter;
    else m.offset_lo = std::min(offset(0), offset(g.ny - 1));
    m.h_y.assign(g.ny, 0.0);

    double total = 0, sx = 0, sxx = 0;
    for (int i = 0; i < g.sites(); ++i) {
        const double w = density[i];
        total += w;
        sx += w * g.x_of(i);
        sxx += w * g.x_of(i) * g.x_of(i);
        m.h_y[offset(g.y_of(i)) - m.offset_lo] += w;
    }
    m.norm = total;
    if (!(total > 0)) return m;
    m.x_mean = sx / total;
    m.sigma_x = std::sqrt(std::max(0.0, sxx / total - m.x_mean * m.x_mean));

    double s1 = 0, s2 = 0, s3 = 0, leak = 0;
    for (std::size_t k = 0; k < m.h_y.size(); ++k) {
        const double o = m.offset_lo + static_cast<double>(k);
        s1 += m.h_y[k] * o;
        if (o < -2.0 * l_B) leak += m.h_y[k];
    }
    m.y_offset_mean = s1 / total;
    for (std::size_t k = 0; k < m.h_y.size(); ++k) {
        const double d = m.offset_lo + static_cast<double>(k) - m.y_offset_mean;
        s2 += m.h_y[k] * d * d;
        s3 += m.h_y[k] * d * d * d;
    }
    m.sigma_y = std::sqrt(s2 / total);
    m.skew_moment = m.sigma_y > 0 ? (s3 / total) / std::pow(m.sigma_y, 3) : 0.0;
    m.leakage = std::clamp(leak / total, 0.0, 1.0);
    const double p10 = histogram_quantile(m.h_y, m.offset_lo, 0.1);
    const double p25 = histogram_quantile(m.h_y, m.offset_lo, 0.25);
    const double p50 = histogram_quantile(m.h_y, m.offset_lo, 0.5);
    const double p75 = histogram_quantile(m.h_y, m.offset_lo, 0.75);
    const double p90 = histogram_quantile(m.h_y, m.offset_lo, 0.9);
    m.skew_kelly = quantile_skew(p10, p50, p90);
    m.skew_bowley = quantile_skew(p25, p50, p75);
    return m;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& p, double t0, double t1) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t0 || t[k] > t1 || !(p[k] > 0)) continue;
        const double y = std::log(p[k]);
        n += 1;
        sx += t[k];
        sy += y;
        sxx += t[k] * t[k];
        sxy += t[k] * y;
    }
    if (n < 2) return kNaN;
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fit_tail_length(const WavepacketMetrics& m, int o0, int o1) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int o = o0; o <= o1; ++o) {
        const int k = o - m.offset_lo;
        if (k < 0 || k >= static_cast<int>(m.h_y.size()) || !(m.h_y[k] > 0)) continue;
        const double y = std::log(m.h_y[k]);
        n += 1;
        sx += o;
        sy += y;
        sxx += static_cast<double>(o) * o;
        sxy += o * y;
    }
    if (n < 2) return kNaN;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return 1.0 / std::abs(slope);
}

namespace {

EvolveOptions evolve_options(const DynamicsSettings& d) {
    EvolveOptions o;
    o.dt = d.dt;
    o.T = d.T;
    o.gamma_p = d.gamma_p;
    o.snapshot_times = d.snapshot_times;
    o.record_stride = d.record_stride;
    o.exec = d.exec;
    o.validate = d.validate;
    return o;
}

int drift_direction(const BuiltLattice& lat) { return lat.params.U0 < 0 ? -1 : 1; }

}  // namespace

EmissionResult run_emission(const EmissionConfig& cfg) {
    const auto lat = build_lattice(cfg.lattice);
    EmissionResult res;
    res.params = lat.params;
    res.emitter = resolve_emitters(lat, {cfg.emitter}).front();
    const auto& g = lat.h.geometry;
    const double lb = lat.params.l_B;
    const auto& e = res.emitter.emitter;
    if ((g.bc_x == Boundary::open && (e.x < lb || g.nx - 1 - e.x < lb)) ||
        (g.bc_y == Boundary::open && (e.y < lb || g.ny - 1 - e.y < lb))) {
        res.warnings.push_back("emitter within l_B of an open boundary; bulk formulas do not apply");
    }
    const auto set = to_emitter_set({res.emitter});
    for (auto& w : set.validate(g)) res.warnings.push_back(w);
    const auto h = build_coupled_hamiltonian(lat.h, set);
    res.trajectory = evolve(h, QuantumState::excited_emitter(h, 0), evolve_options(cfg.dynamics));
    for (const auto& s : res.trajectory.snapshots) {
        auto m = packet_metrics(g, s.density, e.x, e.y, lb, drift_direction(lat));
        m.t = s.t;
        res.metrics.push_back(std::move(m));
    }
    return res;
}

double capture_lag(const LandauAnalytics& p, double g, double detuning, double dt) {
    if (!(p.c_H > 0)) throw ConfigError("capture lag needs U0 > 0");
    const double tau = 200.0;
    const double T = 1.5 * tau;
    const int steps = static_cast<int>(std::llround(T / dt));
    KernelSpec k;
    k.kind = KernelKind::continuum;
    k.continuum = ContinuumKernel{p, ContinuumMode::finite_ly, tau * p.c_H};
    k.positions = {{0.0, 0.0}};
    k.table = tabulate_kernel(k, 1, dt, steps, kernels::Exec::serial);
    k.table_dt = dt;
    VolterraProblem pr;
    pr.omega = {p.omega_ch(0.0) + detuning};
    pr.g = {g};
    pr.c0 = {1.0};
    pr.dt = dt;
    pr.T = T;
    const auto res = volterra_solve(k, pr);
    Trajectory tr;
    tr.t = res.t;
    tr.populations = res.populations;
    return revival_peaks(tr, tau, 1)[0].first - tau;
}

namespace {

double emitter_capture_lag(const EmissionResult& em, const LandauAnalytics& p, double dt) {
    const double ref = std::isnan(em.emitter.lattice_resonance) ? em.emitter.channel_frequency
                                                                : em.emitter.lattice_resonance;
    return capture_lag(p, em.emitter.emitter.g, em.emitter.emitter.omega - ref, dt);
}

}  // namespace

RevivalReport run_revival(const EmissionConfig& cfg) {
    if (cfg.lattice.geometry.bc_y != Boundary::periodic) {
        throw ConfigError("revival scenario needs a periodic y boundary");
    }
    const auto params = LandauAnalytics::make(cfg.lattice.alpha, linear_U0(cfg.lattice.potential));
    if (!(params.c_H > 0)) throw ConfigError("revival scenario needs U0 > 0");
    const double tau = cfg.lattice.geometry.ny / params.c_H;
    if (cfg.dynamics.T < 1.5 * tau) {
        throw ConfigError("revival window [0.5, 1.5] tau_rev = [" + std::to_string(0.5 * tau) + ", " +
                          std::to_string(1.5 * tau) + "] exceeds T = " + std::to_string(cfg.dynamics.T));
    }
    RevivalReport r;
    r.tau_rev_predicted = tau;
    r.emission = run_emission(cfg);
    const auto peaks = revival_peaks(r.emission.trajectory, tau, 1);
    r.t_peak = peaks[0].first;
    r.P_rev = peaks[0].second;
    r.capture_lag = emitter_capture_lag(r.emission, params, cfg.dynamics.dt);
    r.tau_rev_measured = r.t_peak - r.capture_lag;
    return r;
}

RevivalReport run_loop_revival(const EmissionConfig& cfg, std::optional<double> tau_rev) {
    const auto params = LandauAnalytics::make(cfg.lattice.alpha, linear_U0(cfg.lattice.potential));
    if (!(params.c_H > 0)) throw ConfigError("loop revival needs U0 > 0");
    const double tau = tau_rev.value_or(cfg.lattice.geometry.ny / params.c_H);
    if (cfg.dynamics.T < 1.5 * tau) {
        throw ConfigError("revival window needs T >= 1.5 tau_rev = " + std::to_string(1.5 * tau));
    }
    RevivalReport r;
    r.tau_rev_predicted = tau;
    r.emission = run_emission(cfg);
    const auto peaks = revival_peaks(r.emission.trajectory, tau, 1);
    r.t_peak = peaks[0].first;
    r.P_rev = peaks[0].second;
    r.capture_lag = emitter_capture_lag(r.emission, params, cfg.dynamics.dt);
    r.tau_rev_measured = r.t_peak - r.capture_lag;
    return r;
}

std::vector<std::pair<double, double>> revival_peaks(const Trajectory& tr, double tau, int count) {
    std::vector<std::pair<double, double>> peaks;
    for (int n = 1; n <= count; ++n) {
        double best = -1, at = kNaN;
        for (std::size_t k = 0; k < tr.t.size(); ++k) {
            if (tr.t[k] < (n - 0.5) * tau || tr.t[k] > (n + 0.5) * tau) continue;
            if (tr.populations[0][k] > best) {
                best = tr.populations[0][k];
                at = tr.t[k];
            }
        }
        peaks.emplace_back(at, best);
    }
    return peaks;
}

SweepGrid revival_map(const RevivalMapConfig& cfg) {
    const auto p = LandauAnalytics::make(cfg.alpha, cfg.U0);
    if (!(p.c_H > 0)) throw ConfigError("revival map needs U0 > 0");
    const double tau = cfg.Ly / p.c_H;
    const double T = 1.5 * tau;
    const int steps = static_cast<int>(std::llround(T / cfg.dt));

    KernelSpec k;
    k.kind = KernelKind::continuum;
    k.continuum = ContinuumKernel{p, ContinuumMode::finite_ly, cfg.Ly};
    k.positions = {{0.0, 0.0}};
    k.table = tabulate_kernel(k, 1, cfg.dt, steps, cfg.exec);
    k.table_dt = cfg.dt;

    SweepGrid grid;
    grid.row_name = "g_over_gcrit";
    grid.col_name = "detuning_over_UB";
    grid.value_name = "P_rev";
    grid.rows = cfg.g_factors;
    grid.cols = cfg.detunings;
    grid.values.assign(grid.rows.size() * grid.cols.size(), 0.0);
    const long cells = static_cast<long>(grid.values.size());
#pragma omp parallel for schedule(dynamic) if (cfg.exec == kernels::Exec::parallel)
    for (long c = 0; c < cells; ++c) {
        const double gf = grid.rows[c / grid.cols.size()];
        const double dd = grid.cols[c % grid.cols.size()];
        VolterraProblem pr;
        pr.omega = {p.omega_ch(0.0) + dd * p.U_B};
        pr.g = {gf * p.critical_g()};
        pr.c0 = {1.0};
        pr.dt = cfg.dt;
        pr.T = steps * cfg.dt;
        pr.exec = kernels::Exec::serial;
        const auto res = volterra_solve(k, pr);
        double best = 0;
        for (std::size_t s = 0; s < res.t.size(); ++s)
            if (res.t[s] >= 0.5 * tau && res.t[s] <= 1.5 * tau) best = std::max(best, res.populations[0][s]);
        grid.values[c] = best;
    }
    return grid;
}

bool equipotential_connected(const PotentialField& v, double alpha, int x1, int y1, int x2, int y2, double level,
                             double half_width) {
    const auto& g = v.geometry;
    std::vector<char> in_band(g.sites(), 0);
    for (int i = 0; i < g.sites(); ++i) {
        try {
            const auto f = local_field(v, alpha, g.x_of(i), g.y_of(i));
            in_band[i] = std::abs(f.omega_ch_tilde - level) <= half_width;
        } catch (const std::domain_error&) {
        }
    }
    const int a = g.index(x1, y1), b = g.index(x2, y2);
    if (!in_band[a] || !in_band[b]) return false;
    std::vector<char> seen(g.sites(), 0);
    std::deque<int> queue{a};
    seen[a] = 1;
    constexpr int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        if (i == b) return true;
        for (const auto& d : dirs) {
            const int j = g.neighbor(i, d[0], d[1]);
            if (j >= 0 && in_band[j] && !seen[j]) {
                seen[j] = 1;
                queue.push_back(j);
            }
        }
    }
    return false;
}

CriteriaReport check_transfer_criteria(const PotentialField& v, const std::vector<ResolvedEmitter>& emitters,
                                       double alpha, double tolerance, double resonance_tolerance) {
    if (emitters.size() != 2) throw std::invalid_argument("transfer criteria need exactly two emitters");
    CriteriaReport r;
    r.tolerance = tolerance;
    r.resonance_tolerance = resonance_tolerance;
    const auto& e1 = emitters[0].emitter;
    const auto& e2 = emitters[1].emitter;
    const auto f1 = local_field(v, alpha, e1.x, e1.y);
    const auto f2 = local_field(v, alpha, e2.x, e2.y);
    const double ub = 0.5 * (f1.U_B_tilde + f2.U_B_tilde);
    if (!(ub > 0)) throw std::domain_error("transfer criteria need a nonzero local gradient");
    r.resonance_margin = std::abs(f1.omega_ch_tilde - f2.omega_ch_tilde) / ub;
    r.connected = equipotential_connected(v, alpha, e1.x, e1.y, e2.x, e2.y, f1.omega_ch_tilde, 0.5 * ub);
    r.resonance = r.resonance_margin <= resonance_tolerance && r.connected;
    const double sa = std::sqrt(alpha);
    r.coupling_margin = std::max(std::abs(e1.g * sa / f1.U_B_tilde - 1.0), std::abs(e2.g * sa / f2.U_B_tilde - 1.0));
    r.coupling = r.coupling_margin <= tolerance;
    r.gradient_margin = std::abs(f1.U_B_tilde - f2.U_B_tilde) / ub;
    r.gradient = r.gradient_margin <= tolerance;
    return r;
}

double predicted_transfer_time(const LatticeGeometry& g, const LandauAnalytics& p, int y1, int y2, double gamma_e) {
    int dy = y2 - y1;
    if (p.U0 < 0) dy = -dy;
    if (g.bc_y == Boundary::periodic) dy = ((dy % g.ny) + g.ny) % g.ny;
    if (dy <= 0 || !(p.c_H != 0) || !(gamma_e > 0)) return kNaN;
    return dy / std::abs(p.c_H) + 2.0 / gamma_e;
}

TransferReport run_transfer(const BuiltLattice& lat, const std::vector<ResolvedEmitter>& emitters,
                            const TransferConfig& cfg) {
    if (emitters.size() != 2) throw ConfigError("transfer needs exactly two emitters");
    if (emitters[0].emitter.x == emitters[1].emitter.x && emitters[0].emitter.y == emitters[1].emitter.y) {
        throw ConfigError("transfer emitters are co-located");
    }
    TransferReport rep;
    rep.params = lat.params;
    rep.emitters = emitters;
    const auto h = build_coupled_hamiltonian(lat.h, to_emitter_set(emitters));
    rep.trajectory = evolve(h, QuantumState::excited_emitter(h, 0), evolve_options(cfg.dynamics));
    const double t1 = cfg.scan_t1.value_or(cfg.dynamics.T);
    rep.F = -1;
    for (std::size_t k = 0; k < rep.trajectory.t.size(); ++k) {
        const double t = rep.trajectory.t[k];
        if (t < cfg.scan_t0 || t > t1) continue;
        if (rep.trajectory.populations[1][k] > rep.F) {
            rep.F = rep.trajectory.populations[1][k];
            rep.t_star = t;
        }
    }
    rep.F = std::clamp(rep.F, 0.0, 1.0);
    rep.tau_T = predicted_transfer_time(lat.h.geometry, lat.params, emitters[0].emitter.y, emitters[1].emitter.y,
                                        emitters[0].gamma_e);
    try {
        rep.criteria = check_transfer_criteria(lat.potential, emitters, lat.params.alpha);
    } catch (const std::domain_error&) {
        rep.criteria.resonance_margin = rep.criteria.coupling_margin = rep.criteria.gradient_margin = kNaN;
    }
    return rep;
}

TransferReport run_transfer(const TransferConfig& cfg) {
    const auto lat = build_lattice(cfg.lattice);
    return run_transfer(lat, resolve_emitters(lat, cfg.emitters), cfg);
}

SweepGrid disorder_sweep(const DisorderSweepConfig& cfg) {
    if (cfg.n_dis < 1) throw ConfigError("disorder sweep needs N_dis >= 1");
    const auto& geo = cfg.transfer.lattice.geometry;
    const double alpha = cfg.transfer.lattice.alpha;
    const std::size_t nr = cfg.U0s.size(), nc = cfg.sigmas.size();

    struct Row {
        std::vector<ResolvedEmitter> emitters;
        double T{0};
    };
    std::vector<Row> rows(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        LatticeSetup clean{geo, alpha, PotentialSpec{LinearPotential{cfg.U0s[r]}}, std::nullopt};
        const auto lat = build_lattice(clean);
        rows[r].emitters = resolve_emitters(lat, cfg.transfer.emitters);
        double tau = predicted_transfer_time(geo, lat.params, rows[r].emitters[0].emitter.y,
                                             rows[r].emitters[1].emitter.y, rows[r].emitters[0].gamma_e);
        if (std::isnan(tau)) tau = cfg.transfer.dynamics.T / cfg.window_factor;
        rows[r].T = cfg.window_factor * tau;
    }

    const long tasks = static_cast<long>(nr * nc * cfg.n_dis);
    std::vector<double> fidelity(tasks, 0.0);
    const int threads = cfg.jobs > 0 ? cfg.jobs : kernels::max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long t = 0; t < tasks; ++t) {
        const std::size_t cell = t / cfg.n_dis;
        const auto rep = static_cast<std::uint64_t>(t % cfg.n_dis);
        const std::size_t r = cell / nc, c = cell % nc;
        GaugeField gauge = build_gauge(geo, alpha);
        PotentialField v = build_potential(geo, PotentialSpec{LinearPotential{cfg.U0s[r]}});
        const auto noise = build_potential(geo, PotentialSpec{DisorderPotential{cfg.sigmas[c]}},
                                           derive_seed(cfg.base_seed, cell, rep));
        for (int i = 0; i < geo.sites(); ++i) v.values[i] += noise.values[i];
        const auto h = build_coupled_hamiltonian(assemble_hamiltonian(geo, gauge, v), to_emitter_set(rows[r].emitters));
        EvolveOptions o;
        o.dt = cfg.transfer.dynamics.dt;
        o.T = rows[r].T;
        o.gamma_p = cfg.transfer.dynamics.gamma_p;
        o.record_stride = cfg.transfer.dynamics.record_stride;
        o.exec = kernels::Exec::serial;
        const auto tr = evolve(h, QuantumState::excited_emitter(h, 0), o);
        fidelity[t] = *std::max_element(tr.populations[1].begin(), tr.populations[1].end());
    }

    SweepGrid grid;
    grid.row_name = "U0";
    grid.col_name = "sigma_p";
    grid.value_name = "mean_infidelity";
    grid.rows = cfg.U0s;
    grid.cols = cfg.sigmas;
    grid.ensemble = cfg.n_dis;
    grid.base_seed = cfg.base_seed;
    grid.values.assign(nr * nc, 0.0);
    grid.spread.assign(nr * nc, 0.0);
    for (std::size_t cell = 0; cell < nr * nc; ++cell) {
        double s = 0, s2 = 0;
        for (int k = 0; k < cfg.n_dis; ++k) {
            const double inf = 1.0 - fidelity[cell * cfg.n_dis + k];
            s += inf;
            s2 += inf * inf;
        }
        const double mean = s / cfg.n_dis;
        grid.values[cell] = mean;
        grid.spread[cell] = std::sqrt(std::max(0.0, s2 / cfg.n_dis - mean * mean));
    }
    return grid;
}

BeamSplitterReport split_weights(const LatticeGeometry& g, const std::vector<double>& density, double cx, double cy,
                                 double r_dead) {
    BeamSplitterReport r;
    std::vector<std::pair<double, double>> nw, se;
    for (int i = 0; i < g.sites(); ++i) {
        const double w = density[i];
        const double dx = g.x_of(i) - cx, dy = g.y_of(i) - cy;
        r.photon_norm += w;
        if (dx * dx + dy * dy < r_dead * r_dead || dx == 0 || dy == 0) {
            r.residual += w;
        } else if (dx < 0 && dy > 0) {
            r.NW += w;
            nw.emplace_back(-dx + dy, w);
        } else if (dx > 0 && dy < 0) {
            r.SE += w;
            se.emplace_back(dx - dy, w);
        } else {
            r.back += w;
        }
    }
    r.skew_NW = nw.empty() ? kNaN : weighted_kelly(nw);
    r.skew_SE = se.empty() ? kNaN : weighted_kelly(se);
    return r;
}

BeamSplitterReport run_beam_splitter(const BeamSplitterConfig& cfg) {
    if (cfg.dynamics.snapshot_times.empty()) throw ConfigError("beam splitter needs a snapshot time");
    const double t = cfg.dynamics.snapshot_times.front();
    const auto lat = build_lattice(cfg.lattice);
    const auto em = resolve_emitters(lat, {cfg.emitter}).front();
    const double speed = em.U_B_local * lat.params.l_B;
    const double dist = std::hypot(em.emitter.x - cfg.cx, em.emitter.y - cfg.cy);
    if (!(speed > 0) || t < dist / speed) {
        throw ConfigError("snapshot at t = " + std::to_string(t) + " precedes arrival at the crossing (t >= " +
                          std::to_string(dist / speed) + ")");
    }
    EmissionConfig ec{cfg.lattice, cfg.emitter, cfg.dynamics};
    auto emission = run_emission(ec);
    const auto& snap = emission.trajectory.snapshots.front();
    auto rep = split_weights(lat.h.geometry, snap.density, cfg.cx, cfg.cy, 2.0 * lat.params.l_B);
    rep.t = snap.t;
    rep.emission = std::move(emission);
    return rep;
}

}  // namespace hallwave
