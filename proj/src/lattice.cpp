#include "hallwave/lattice.hpp"

#include "hallwave/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace hallwave {

const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "open" || s == "obc") return Boundary::open;
    if (s == "periodic" || s == "pbc") return Boundary::periodic;
    throw ConfigError("unknown boundary condition '" + s + "' (expected open|periodic)");
}

LatticeGeometry LatticeGeometry::make(int nx, int ny, Boundary bc_x, Boundary bc_y) {
    if (nx < 1 || ny < 1) {
        throw ConfigError("lattice dimensions must be positive (got " + std::to_string(nx) + "x" +
                          std::to_string(ny) + ")");
    }
    return LatticeGeometry{nx, ny, bc_x, bc_y};
}

int LatticeGeometry::neighbor(int i, int dx, int dy) const {
    int x = x_of(i) + dx;
    int y = y_of(i) + dy;
    if (x < 0 || x >= nx) {
        if (bc_x == Boundary::open) return -1;
        x = (x + nx) % nx;
    }
    if (y < 0 || y >= ny) {
        if (bc_y == Boundary::open) return -1;
        y = (y + ny) % ny;
    }
    return index(x, y);
}

double LatticeGeometry::dy_wrapped(double y_to, double y_from) const {
    double d = y_to - y_from;
    if (bc_y == Boundary::periodic) {
        d = std::remainder(d, static_cast<double>(ny));
    }
    return d;
}

GaugeField build_gauge(const LatticeGeometry& geometry, double alpha) {
    if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
    if (geometry.bc_x == Boundary::periodic) {
        const double a_nx = alpha * geometry.nx;
        if (std::abs(a_nx - std::round(a_nx)) > 1e-12) {
            std::ostringstream msg;
            msg << "periodic x boundary requires alpha*Nx to be an integer (alpha*Nx = " << a_nx << ")";
            throw ConfigError(msg.str());
        }
    }
    return GaugeField{alpha, geometry};
}

double GaugeField::phase(int from, int to) const {
    const auto& g = geometry;
    const int xf = g.x_of(from), yf = g.y_of(from);
    const int xt = g.x_of(to), yt = g.y_of(to);
    const double two_pi_alpha = 2.0 * std::numbers::pi * alpha;
    if (xf == xt) {
        if (g.neighbor(from, 0, 1) == to) return -two_pi_alpha * xf;
        if (g.neighbor(from, 0, -1) == to) return two_pi_alpha * xf;
    }
    if (yf == yt && (g.neighbor(from, 1, 0) == to || g.neighbor(from, -1, 0) == to)) return 0.0;
    throw std::invalid_argument("GaugeField::phase: sites are not nearest neighbors");
}

double GaugeField::plaquette_flux(int x, int y) const {
    const auto& g = geometry;
    const int a = g.index(x, y);
    const int b = g.neighbor(a, 0, 1);
    const int c = b < 0 ? -1 : g.neighbor(b, 1, 0);
    const int d = g.neighbor(a, 1, 0);
    if (b < 0 || c < 0 || d < 0) throw std::invalid_argument("plaquette outside the lattice");
    double s = phase(a, b) + phase(b, c) + phase(c, d) + phase(d, a);
    s = std::fmod(s, 2.0 * std::numbers::pi);
    if (s < 0) s += 2.0 * std::numbers::pi;
    return s;
}

std::string PotentialSpec::name() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LinearPotential>) return "linear";
            else if constexpr (std::is_same_v<T, ConfiningPotential>) return "confining";
            else if constexpr (std::is_same_v<T, DisorderPotential>) return "disorder";
            else if constexpr (std::is_same_v<T, SaddlePotential>) return "saddle";
            else if constexpr (std::is_same_v<T, SmoothRandomPotential>) return "smooth_random";
            else if constexpr (std::is_same_v<T, GridPotential>) return "grid";
            else return "sum";
        },
        kind);
}

bool PotentialSpec::stochastic() const {
    if (std::holds_alternative<DisorderPotential>(kind) || std::holds_alternative<SmoothRandomPotential>(kind))
        return true;
    if (const auto* s = std::get_if<SumPotential>(&kind)) {
        return std::any_of(s->terms.begin(), s->terms.end(), [](const auto& t) { return t.stochastic(); });
    }
    return false;
}

GridPotential load_grid_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential grid file '" + path + "'");
    GridPotential g;
    g.source = path;
    double v;
    while (in >> v) g.values.push_back(v);
    if (!in.eof()) throw ConfigError("non-numeric token in potential grid file '" + path + "'");
    return g;
}

namespace {

// Separable Gaussian blur; open axes are mirrored, periodic axes wrap.
std::vector<double> gaussian_blur(const LatticeGeometry& g, const std::vector<double>& in, double xi) {
    const int r = std::max(1, static_cast<int>(std::ceil(4.0 * xi)));
    std::vector<double> w(2 * r + 1);
    for (int d = -r; d <= r; ++d) w[d + r] = std::exp(-0.5 * d * d / (xi * xi));

    auto fold = [](int c, int n, Boundary bc) {
        if (bc == Boundary::periodic) return ((c % n) + n) % n;
        if (n == 1) return 0;
        const int period = 2 * (n - 1);
        c = ((c % period) + period) % period;
        return c < n ? c : period - c;
    };

    std::vector<double> tmp(in.size(), 0.0), out(in.size(), 0.0);
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            double s = 0;
            for (int d = -r; d <= r; ++d) s += w[d + r] * in[g.index(fold(x + d, g.nx, g.bc_x), y)];
            tmp[g.index(x, y)] = s;
        }
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            double s = 0;
            for (int d = -r; d <= r; ++d) s += w[d + r] * tmp[g.index(x, fold(y + d, g.ny, g.bc_y))];
            out[g.index(x, y)] = s;
        }
    return out;
}

double rms_gradient(const LatticeGeometry& g, const std::vector<double>& v) {
    double acc = 0;
    int count = 0;
    for (int i = 0; i < g.sites(); ++i) {
        const int xp = g.neighbor(i, 1, 0), xm = g.neighbor(i, -1, 0);
        const int yp = g.neighbor(i, 0, 1), ym = g.neighbor(i, 0, -1);
        if (xp < 0 || xm < 0 || yp < 0 || ym < 0) continue;
        const double gx = 0.5 * (v[xp] - v[xm]);
        const double gy = 0.5 * (v[yp] - v[ym]);
        acc += gx * gx + gy * gy;
        ++count;
    }
    return count ? std::sqrt(acc / count) : 0.0;
}

std::uint64_t require_seed(std::optional<std::uint64_t> seed, const std::string& what) {
    if (!seed) throw ConfigError("potential variant '" + what + "' is stochastic and needs a seed");
    return *seed;
}

}  // namespace

PotentialField build_potential(const LatticeGeometry& g, const PotentialSpec& spec,
                               std::optional<std::uint64_t> seed) {
    PotentialField f{g, std::vector<double>(g.sites(), 0.0), spec.name()};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearPotential>) {
                if (!std::isfinite(p.U0)) throw ConfigError("linear potential: U0 must be finite");
                for (int i = 0; i < g.sites(); ++i) f.values[i] = -p.U0 * (g.x_of(i) - p.x0);
            } else if constexpr (std::is_same_v<T, ConfiningPotential>) {
                if (!(p.V0 > 0)) throw ConfigError("confining potential: wall height V0 must be > 0");
                if (p.p < 1) throw ConfigError("confining potential: steepness p must be >= 1");
                const double lx = std::max(1, g.nx - 1), ly = std::max(1, g.ny - 1);
                for (int i = 0; i < g.sites(); ++i) {
                    const double u = (2.0 * g.x_of(i) - lx) / lx;
                    const double v = (2.0 * g.y_of(i) - ly) / ly;
                    f.values[i] = p.V0 * (std::pow(u, 2 * p.p) + std::pow(v, 2 * p.p));
                }
            } else if constexpr (std::is_same_v<T, DisorderPotential>) {
                if (!(p.sigma >= 0)) throw ConfigError("disorder potential: sigma must be >= 0");
                std::mt19937_64 rng(require_seed(seed, "disorder"));
                std::normal_distribution<double> n01(0.0, 1.0);
                for (auto& v : f.values) v = p.sigma * n01(rng);
            } else if constexpr (std::is_same_v<T, SaddlePotential>) {
                for (int i = 0; i < g.sites(); ++i)
                    f.values[i] = p.U0 * (std::abs(g.x_of(i) - p.cx) - std::abs(g.y_of(i) - p.cy));
            } else if constexpr (std::is_same_v<T, SmoothRandomPotential>) {
                if (!(p.xi > 0)) throw ConfigError("smooth_random potential: xi must be > 0");
                if (!(p.gradient_scale >= 0)) throw ConfigError("smooth_random potential: gradient_scale must be >= 0");
                std::mt19937_64 rng(require_seed(seed, "smooth_random"));
                std::normal_distribution<double> n01(0.0, 1.0);
                std::vector<double> noise(g.sites());
                for (auto& v : noise) v = n01(rng);
                auto smooth = gaussian_blur(g, noise, p.xi);
                double mean = 0;
                for (double v : smooth) mean += v;
                mean /= smooth.size();
                for (auto& v : smooth) v -= mean;
                const double rms = rms_gradient(g, smooth);
                const double scale = rms > 0 ? p.gradient_scale / rms : 0.0;
                for (int i = 0; i < g.sites(); ++i) f.values[i] = scale * smooth[i];
            } else if constexpr (std::is_same_v<T, GridPotential>) {
                if (static_cast<int>(p.values.size()) != g.sites()) {
                    throw ConfigError("grid potential has " + std::to_string(p.values.size()) +
                                      " values, lattice needs " + std::to_string(g.sites()));
                }
                f.values = p.values;
            } else {
                for (std::size_t t = 0; t < p.terms.size(); ++t) {
                    std::optional<std::uint64_t> sub;
                    if (seed) sub = derive_seed(*seed, 0x706f74ULL, t);
                    const auto part = build_potential(g, p.terms[t], sub);
                    for (int i = 0; i < g.sites(); ++i) f.values[i] += part.values[i];
                }
            }
        },
        spec.kind);
    for (double v : f.values)
        if (!std::isfinite(v)) throw ConfigError("potential '" + f.provenance + "' produced a non-finite value");
    return f;
}

cplx SparseMatrix::coeff(int r, int c) const {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col[k] == c) return val[k];
    return {0.0, 0.0};
}

double SparseMatrix::hermiticity_defect() const {
    double worst = 0;
    for (int r = 0; r < n; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            worst = std::max(worst, std::abs(val[k] - std::conj(coeff(col[k], r))));
    return worst;
}

int SparseMatrix::max_row_nonzeros() const {
    int m = 0;
    for (int r = 0; r < n; ++r) m = std::max(m, row_ptr[r + 1] - row_ptr[r]);
    return m;
}

HoppingOperator assemble_hamiltonian(const LatticeGeometry& g, const GaugeField& gauge,
                                     const PotentialField& potential) {
    if (!(gauge.geometry == g) || !(potential.geometry == g)) {
        throw ConfigError("assemble_hamiltonian: gauge, potential and geometry were built on different lattices");
    }
    HoppingOperator op{g, gauge.alpha, {}, potential.values};
    auto& m = op.matrix;
    m.n = g.sites();
    m.row_ptr.assign(m.n + 1, 0);
    const double two_pi_alpha = 2.0 * std::numbers::pi * gauge.alpha;
    // Directed hops i -> j scattered into row j.
    std::vector<std::map<int, cplx>> rows(m.n);
    constexpr int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int i = 0; i < m.n; ++i) {
        rows[i][i] += potential.values[i];
        for (const auto& d : dirs) {
            const int j = g.neighbor(i, d[0], d[1]);
            if (j < 0 || j == i) continue;
            const double phi = -d[1] * two_pi_alpha * g.x_of(i);
            rows[j][i] += -std::polar(1.0, phi);
        }
    }
    for (int r = 0; r < m.n; ++r) {
        for (const auto& [c, v] : rows[r]) {
            m.col.push_back(c);
            m.val.push_back(v);
        }
        m.row_ptr[r + 1] = static_cast<int>(m.col.size());
    }
    return op;
}

}  // namespace hallwave
