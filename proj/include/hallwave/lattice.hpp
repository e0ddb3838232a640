// lattice.hpp - geometry, Landau-gauge phases, on-site potentials, lattice Hamiltonian
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hallwave {

using cplx = std::complex<double>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Boundary { open, periodic };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

// Square grid, sites indexed row-major with x fastest: i = y*nx + x.
struct LatticeGeometry {
    int nx{0}, ny{0};
    Boundary bc_x{Boundary::open};
    Boundary bc_y{Boundary::open};

    static LatticeGeometry make(int nx, int ny, Boundary bc_x, Boundary bc_y);

    int sites() const { return nx * ny; }
    int index(int x, int y) const { return y * nx + x; }
    int x_of(int i) const { return i % nx; }
    int y_of(int i) const { return i / nx; }
    bool contains(int x, int y) const { return x >= 0 && x < nx && y >= 0 && y < ny; }

    // Neighbor in direction (dx,dy) with |dx|+|dy| = 1, or -1 past an open edge.
    int neighbor(int i, int dx, int dy) const;

    // Shortest signed displacement along y, honoring periodicity.
    double dy_wrapped(double y_to, double y_from) const;

    bool operator==(const LatticeGeometry&) const = default;
};

struct GaugeField {
    double alpha{0.0};
    LatticeGeometry geometry;

    // Phase phi carried by the hop from -> to, entering H_{to,from} = -J exp(i phi).
    double phase(int from, int to) const;
    // Product-of-matrix-elements phase around plaquette with lower-left corner (x,y).
    double plaquette_flux(int x, int y) const;
};

GaugeField build_gauge(const LatticeGeometry& geometry, double alpha);

// Potential descriptors. Coordinates are lattice indices.
struct LinearPotential {
    double U0{0.0};
    double x0{0.0};  // V = -U0 (x - x0)
};
struct ConfiningPotential {
    double V0{4.0};
    int p{4};
};
struct DisorderPotential {
    double sigma{0.0};
};
struct SaddlePotential {
    double U0{0.0};
    double cx{0.0}, cy{0.0};  // V = U0 (|x-cx| - |y-cy|)
};
struct SmoothRandomPotential {
    double xi{0.0};              // Gaussian correlation length, l0 units
    double gradient_scale{0.0};  // target RMS |grad V| over the interior
};
struct GridPotential {
    std::vector<double> values;  // ny rows of nx values, row-major
    std::string source;
};
struct PotentialSpec;
struct SumPotential {
    std::vector<PotentialSpec> terms;
};

struct PotentialSpec {
    std::variant<LinearPotential, ConfiningPotential, DisorderPotential, SaddlePotential,
                 SmoothRandomPotential, GridPotential, SumPotential>
        kind;

    std::string name() const;
    bool stochastic() const;
};

GridPotential load_grid_potential(const std::string& path);

struct PotentialField {
    LatticeGeometry geometry;
    std::vector<double> values;
    std::string provenance;

    double at(int x, int y) const { return values[geometry.index(x, y)]; }
};

PotentialField build_potential(const LatticeGeometry& geometry, const PotentialSpec& spec,
                               std::optional<std::uint64_t> seed = std::nullopt);

// Compressed sparse rows, complex Hermitian.
struct SparseMatrix {
    int n{0};
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<cplx> val;

    cplx coeff(int r, int c) const;
    double hermiticity_defect() const;
    int max_row_nonzeros() const;
};

struct HoppingOperator {
    LatticeGeometry geometry;
    double alpha{0.0};
    SparseMatrix matrix;
    std::vector<double> diagonal;

    int dim() const { return matrix.n; }
};

HoppingOperator assemble_hamiltonian(const LatticeGeometry& geometry, const GaugeField& gauge,
                                     const PotentialField& potential);

}  // namespace hallwave
