#include "hallwave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace hallwave {

std::vector<std::string> EmitterSet::validate(const LatticeGeometry& g) const {
    std::set<int> seen;
    std::vector<std::string> warnings;
    for (std::size_t n = 0; n < list.size(); ++n) {
        const auto& e = list[n];
        if (!g.contains(e.x, e.y)) {
            throw ConfigError("emitter " + std::to_string(n) + " at (" + std::to_string(e.x) + "," +
                              std::to_string(e.y) + ") is off the lattice");
        }
        if (!(e.g >= 0)) throw ConfigError("emitter " + std::to_string(n) + " has negative coupling g");
        if (!std::isfinite(e.omega)) throw ConfigError("emitter " + std::to_string(n) + " frequency is not finite");
        if (!seen.insert(g.index(e.x, e.y)).second) {
            throw ConfigError("two emitters share site (" + std::to_string(e.x) + "," + std::to_string(e.y) + ")");
        }
    }
    if (size() * 10 > g.sites()) warnings.push_back("emitter count exceeds M/10");
    return warnings;
}

CoupledHamiltonian build_coupled_hamiltonian(const HoppingOperator& h, const EmitterSet& emitters) {
    emitters.validate(h.geometry);
    const int m = h.dim();
    const int n = emitters.size();
    CoupledHamiltonian c;
    c.geometry = h.geometry;
    c.photon_dim = m;
    std::vector<std::map<int, cplx>> rows(m + n);
    for (int r = 0; r < m; ++r)
        for (int k = h.matrix.row_ptr[r]; k < h.matrix.row_ptr[r + 1]; ++k) rows[r][h.matrix.col[k]] = h.matrix.val[k];
    for (int e = 0; e < n; ++e) {
        const auto& em = emitters.list[e];
        const int site = h.geometry.index(em.x, em.y);
        c.emitter_sites.push_back(site);
        rows[m + e][m + e] = em.omega;
        if (em.g != 0) {
            rows[m + e][site] = 0.5 * em.g;
            rows[site][m + e] = 0.5 * em.g;
        }
    }
    auto& s = c.matrix;
    s.n = m + n;
    s.row_ptr.assign(s.n + 1, 0);
    for (int r = 0; r < s.n; ++r) {
        for (const auto& [col, v] : rows[r]) {
            s.col.push_back(col);
            s.val.push_back(v);
        }
        s.row_ptr[r + 1] = static_cast<int>(s.col.size());
    }
    return c;
}

QuantumState QuantumState::excited_emitter(const CoupledHamiltonian& h, int n) {
    if (n < 0 || n >= h.emitters()) throw std::out_of_range("no emitter with index " + std::to_string(n));
    QuantumState s{Eigen::VectorXcd::Zero(h.dim()), h.photon_dim};
    s.amp[h.emitter_row(n)] = 1.0;
    return s;
}

QuantumState QuantumState::photon(const CoupledHamiltonian& h, const Eigen::VectorXcd& field) {
    if (field.size() != h.photon_dim) throw std::invalid_argument("photon field has the wrong dimension");
    QuantumState s{Eigen::VectorXcd::Zero(h.dim()), h.photon_dim};
    s.amp.head(h.photon_dim) = field;
    return s;
}

double spectral_radius_bound(const SparseMatrix& h) {
    double best = 0;
    for (int r = 0; r < h.n; ++r) {
        double s = 0;
        for (int k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k) s += std::abs(h.val[k]);
        best = std::max(best, s);
    }
    return best;
}

namespace {

struct Rk4 {
    const SparseMatrix& h;
    int photon_dim;
    double frame;
    double gamma;
    kernels::Exec exec;
    std::vector<cplx> k1, k2, k3, k4, tmp;

    Rk4(const SparseMatrix& m, int pd, double w, double g, kernels::Exec e)
        : h(m), photon_dim(pd), frame(w), gamma(g), exec(e), k1(m.n), k2(m.n), k3(m.n), k4(m.n), tmp(m.n) {}

    void deriv(const cplx* in, cplx* out) {
        kernels::spmv(h, {in, static_cast<std::size_t>(h.n)}, {out, static_cast<std::size_t>(h.n)}, exec);
        const cplx mi{0.0, -1.0};
        for (int i = 0; i < h.n; ++i) out[i] = mi * (out[i] - frame * in[i]);
        if (gamma != 0)
            for (int i = 0; i < photon_dim; ++i) out[i] -= 0.5 * gamma * in[i];
    }

    void step(cplx* psi, double dt) {
        const int n = h.n;
        deriv(psi, k1.data());
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
        deriv(tmp.data(), k2.data());
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
        deriv(tmp.data(), k3.data());
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + dt * k3[i];
        deriv(tmp.data(), k4.data());
        for (int i = 0; i < n; ++i) psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
};

double expectation(const SparseMatrix& h, const Eigen::VectorXcd& psi) {
    std::vector<cplx> hp(h.n);
    kernels::spmv_serial(h, {psi.data(), static_cast<std::size_t>(h.n)}, hp);
    cplx num{};
    for (int i = 0; i < h.n; ++i) num += std::conj(psi[i]) * hp[i];
    const double den = psi.squaredNorm();
    return den > 0 ? num.real() / den : 0.0;
}

}  // namespace

double validate_timestep(const CoupledHamiltonian& h, const QuantumState& psi0, double dt, double frame, double span,
                         kernels::Exec exec) {
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt)));
    Eigen::VectorXcd psi = psi0.amp;
    const double n0 = psi.squaredNorm();
    Rk4 rk(h.matrix, h.photon_dim, frame, 0.0, exec);
    for (long k = 0; k < steps; ++k) rk.step(psi.data(), dt);
    const double rate = std::abs(psi.squaredNorm() - n0) / (n0 > 0 ? n0 : 1.0) / (steps * dt);
    if (!(rate <= 1e-6)) {
        std::ostringstream msg;
        msg << "dt too large for ||H||: dt = " << dt << ", ||H|| <= " << spectral_radius_bound(h.matrix)
            << ", dry-run norm drift " << rate << " per unit time exceeds 1e-6";
        throw DynamicsError(msg.str());
    }
    return rate;
}

Trajectory evolve(const CoupledHamiltonian& h, const QuantumState& psi0, const EvolveOptions& opt) {
    if (!(opt.dt > 0)) throw DynamicsError("dt must be > 0");
    if (!(opt.T >= 0)) throw DynamicsError("T must be >= 0");
    if (!(opt.gamma_p >= 0)) throw DynamicsError("gamma_p must be >= 0");
    if (psi0.amp.size() != h.dim()) throw DynamicsError("initial state dimension does not match the Hamiltonian");
    const long steps = std::llround(opt.T / opt.dt);
    const double frame = opt.frame.value_or(expectation(h.matrix, psi0.amp));
    const int stride = std::max(1, opt.record_stride);

    Trajectory tr;
    tr.frame = frame;
    if (opt.validate && steps > 0) {
        tr.dry_run_drift_rate =
            validate_timestep(h, psi0, opt.dt, frame, std::min(opt.validation_span, steps * opt.dt), opt.exec);
    }

    std::multimap<long, double> snap_at;
    for (double ts : opt.snapshot_times) {
        const long k = std::llround(ts / opt.dt);
        if (ts < 0 || k > steps) {
            throw DynamicsError("snapshot time " + std::to_string(ts) + " outside [0, " +
                                std::to_string(steps * opt.dt) + "]");
        }
        snap_at.emplace(k, ts);
    }

    const int ne = h.emitters();
    tr.amplitudes.assign(ne, {});
    tr.populations.assign(ne, {});
    Eigen::VectorXcd psi = psi0.amp;
    Rk4 rk(h.matrix, h.photon_dim, frame, opt.gamma_p, opt.exec);

    auto record = [&](long k) {
        const double t = k * opt.dt;
        const cplx lab = std::polar(1.0, -frame * t);
        tr.t.push_back(t);
        for (int n = 0; n < ne; ++n) {
            const cplx c = psi[h.emitter_row(n)] * lab;
            tr.amplitudes[n].push_back(c);
            tr.populations[n].push_back(std::norm(c));
        }
        tr.photon_norm.push_back(psi.head(h.photon_dim).squaredNorm());
    };
    auto snapshot = [&](long k) {
        auto [lo, hi] = snap_at.equal_range(k);
        for (auto it = lo; it != hi; ++it) {
            Snapshot s{k * opt.dt, std::vector<double>(h.photon_dim)};
            for (int i = 0; i < h.photon_dim; ++i) s.density[i] = std::norm(psi[i]);
            tr.snapshots.push_back(std::move(s));
        }
    };

    record(0);
    snapshot(0);
    for (long k = 1; k <= steps; ++k) {
        rk.step(psi.data(), opt.dt);
        if (k % stride == 0 || k == steps) record(k);
        snapshot(k);
    }
    tr.final_state = QuantumState{psi * std::polar(1.0, -frame * steps * opt.dt), h.photon_dim};
    return tr;
}

const char* KernelSpec::name() const {
    switch (kind) {
        case KernelKind::exact: return "exact";
        case KernelKind::gaussian_lll: return "gaussian_lll";
        case KernelKind::continuum: return "continuum";
        case KernelKind::flat_markov: return "flat_markov";
    }
    return "?";
}

std::vector<cplx> tabulate_kernel(const KernelSpec& k, int n, double dt, int steps, kernels::Exec exec) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> table((steps + 1) * nn, cplx{});
    std::vector<double> times(steps + 1);
    for (int s = 0; s <= steps; ++s) times[s] = s * dt;
    switch (k.kind) {
        case KernelKind::exact: {
            if (!k.eig) throw DynamicsError("exact kernel needs an eigendecomposition");
            if (static_cast<int>(k.sites.size()) != n) throw DynamicsError("exact kernel needs one site per emitter");
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const auto g = greens_exact_series(*k.eig, k.sites[r], k.sites[c], times, exec);
                    for (int s = 0; s <= steps; ++s) table[s * nn + r * n + c] = g[s];
                }
            break;
        }
        case KernelKind::gaussian_lll: {
            const double ub = k.params.U_B;
            for (int s = 0; s <= steps; ++s) {
                const double v = k.params.alpha * std::exp(-0.25 * ub * ub * times[s] * times[s]);
                for (int r = 0; r < n; ++r) table[s * nn + r * n + r] = v;
            }
            break;
        }
        case KernelKind::continuum: {
            if (static_cast<int>(k.positions.size()) != n)
                throw DynamicsError("continuum kernel needs one position per emitter");
#pragma omp parallel for schedule(static) if (exec == kernels::Exec::parallel)
            for (int s = 0; s <= steps; ++s)
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c)
                        table[s * nn + r * n + c] = k.continuum(times[s], k.positions[r].first, k.positions[r].second,
                                                                k.positions[c].first, k.positions[c].second);
            break;
        }
        case KernelKind::flat_markov: throw DynamicsError("flat-Markov kernel has no tabulated form");
    }
    return table;
}

VolterraResult volterra_solve(const KernelSpec& kernel, const VolterraProblem& pr) {
    const int n = static_cast<int>(pr.omega.size());
    if (static_cast<int>(pr.g.size()) != n || static_cast<int>(pr.c0.size()) != n)
        throw DynamicsError("Volterra problem: omega, g and c0 must have one entry per emitter");
    if (!(pr.dt > 0) || !(pr.T >= 0)) throw DynamicsError("Volterra problem: need dt > 0 and T >= 0");
    const int steps = static_cast<int>(std::llround(pr.T / pr.dt));
    VolterraResult res;
    res.t.resize(steps + 1);
    for (int s = 0; s <= steps; ++s) res.t[s] = s * pr.dt;
    res.amplitudes.assign(n, std::vector<cplx>(steps + 1));
    res.populations.assign(n, std::vector<double>(steps + 1));

    if (kernel.kind == KernelKind::flat_markov) {
        if (static_cast<int>(kernel.rates.size()) != n) throw DynamicsError("flat-Markov kernel needs one rate per emitter");
        for (int e = 0; e < n; ++e)
            for (int s = 0; s <= steps; ++s) {
                const cplx c = pr.c0[e] * std::exp(cplx{-kernel.rates[e], -pr.omega[e]} * res.t[s]);
                res.amplitudes[e][s] = c;
                res.populations[e][s] = std::norm(c);
            }
        return res;
    }

    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> table;
    if (!kernel.table.empty()) {
        if (std::abs(kernel.table_dt - pr.dt) > 1e-12 * pr.dt || kernel.table.size() < (steps + 1) * nn) {
            throw DynamicsError("kernel grid mismatch: table has dt = " + std::to_string(kernel.table_dt) + " and " +
                                std::to_string(kernel.table.size() / std::max<std::size_t>(nn, 1)) +
                                " points, solver needs dt = " + std::to_string(pr.dt) + " and " +
                                std::to_string(steps + 1));
        }
        table.assign(kernel.table.begin(), kernel.table.begin() + (steps + 1) * nn);
    } else {
        table = tabulate_kernel(kernel, n, pr.dt, steps, pr.exec);
    }

    double frame = pr.omega.empty() ? 0.0 : pr.omega[0];
    for (int e = 0; e < n; ++e)
        if (std::abs(pr.c0[e]) > 0) {
            frame = pr.omega[e];
            break;
        }
    if (pr.frame) frame = *pr.frame;

    // K~[m] = D G(m dt) D exp(i frame m dt), D = diag(g/2)
    for (int s = 0; s <= steps; ++s) {
        const cplx rot = std::polar(1.0, frame * res.t[s]);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) table[s * nn + r * n + c] *= 0.25 * pr.g[r] * pr.g[c] * rot;
    }

    const double dt = pr.dt;
    const cplx I{0.0, 1.0};
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
    for (int r = 0; r < n; ++r) {
        a(r, r) += 0.5 * dt * I * (pr.omega[r] - frame);
        for (int c = 0; c < n; ++c) a(r, c) += 0.25 * dt * dt * table[r * n + c];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);

    std::vector<cplx> hist((steps + 1) * static_cast<std::size_t>(n));
    std::vector<cplx> f_prev(n, cplx{}), sum(n);
    for (int e = 0; e < n; ++e) hist[e] = pr.c0[e];
    Eigen::VectorXcd rhs(n), ck(n);
    for (int k = 1; k <= steps; ++k) {
        kernels::history_sum(table, hist, n, k, sum, pr.exec);
        for (int r = 0; r < n; ++r) {
            const cplx prev = hist[(k - 1) * n + r];
            const cplx s_k = -dt * sum[r];
            rhs[r] = prev - 0.5 * dt * I * (pr.omega[r] - frame) * prev + 0.5 * dt * (f_prev[r] + s_k);
            sum[r] = s_k;
        }
        ck = lu.solve(rhs);
        for (int r = 0; r < n; ++r) {
            hist[k * n + r] = ck[r];
            cplx k0c{};
            for (int c = 0; c < n; ++c) k0c += table[r * n + c] * ck[c];
            f_prev[r] = sum[r] - 0.5 * dt * k0c;
        }
    }

    for (int s = 0; s <= steps; ++s) {
        const cplx lab = std::polar(1.0, -frame * res.t[s]);
        for (int e = 0; e < n; ++e) {
            res.amplitudes[e][s] = hist[s * n + e] * lab;
            res.populations[e][s] = std::norm(hist[s * n + e]);
        }
    }
    return res;
}

double markov_rate(double g, double alpha, double U_B, double delta) {
    if (!(U_B > 0)) {
        throw DynamicsError("markov_rate needs U_B > 0; at U_B = 0 the emitter forms a bound state with Rabi "
                            "frequency Omega = g sqrt(alpha)");
    }
    return 0.5 * std::sqrt(std::numbers::pi) * g * g * alpha / U_B * std::exp(-delta * delta / (U_B * U_B));
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::weak: return "weak";
        case Regime::critical: return "critical";
        case Regime::strong: return "strong";
    }
    return "?";
}

RegimeInfo classify_regime(double g, double alpha, double U_B) {
    if (!(U_B > 0)) throw DynamicsError("classify_regime needs U_B > 0");
    RegimeInfo info;
    info.ratio = g * std::sqrt(alpha) / U_B;
    if (info.ratio < 1.0 / (2.0 * std::sqrt(2.0))) info.regime = Regime::weak;
    else if (info.ratio > 4.0) info.regime = Regime::strong;
    else info.regime = Regime::critical;
    return info;
}

}  // namespace hallwave
