// dynamics.hpp - single-excitation evolution of lattice + emitters, memory-kernel solvers
#pragma once

#include "hallwave/propagator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hallwave {

struct DynamicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Emitter {
    int x{0}, y{0};
    double omega{0};
    double g{0};
};

struct EmitterSet {
    std::vector<Emitter> list;

    int size() const { return static_cast<int>(list.size()); }
    // Throws on off-grid or duplicate sites and negative g; returns warnings.
    std::vector<std::string> validate(const LatticeGeometry& g) const;
};

// Photon block first (dimension M), then one row per emitter.
struct CoupledHamiltonian {
    SparseMatrix matrix;
    LatticeGeometry geometry;
    int photon_dim{0};
    std::vector<int> emitter_sites;

    int dim() const { return matrix.n; }
    int emitter_row(int n) const { return photon_dim + n; }
    int emitters() const { return static_cast<int>(emitter_sites.size()); }
};

CoupledHamiltonian build_coupled_hamiltonian(const HoppingOperator& h, const EmitterSet& emitters);

struct QuantumState {
    Eigen::VectorXcd amp;
    int photon_dim{0};

    static QuantumState excited_emitter(const CoupledHamiltonian& h, int n);
    static QuantumState photon(const CoupledHamiltonian& h, const Eigen::VectorXcd& field);

    cplx emitter(int n) const { return amp[photon_dim + n]; }
    double photon_norm() const { return amp.head(photon_dim).squaredNorm(); }
    double norm() const { return amp.squaredNorm(); }
};

struct EvolveOptions {
    double gamma_p{0};
    double dt{0.01};
    double T{0};
    std::vector<double> snapshot_times;
    int record_stride{1};
    std::optional<double> frame;  // rotating-frame frequency; default <psi0|H|psi0>
    bool validate{true};
    double validation_span{20.0};
    kernels::Exec exec{kernels::Exec::parallel};
};

struct Snapshot {
    double t{0};
    std::vector<double> density;  // |phi(r_i)|^2, row-major
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<cplx>> amplitudes;    // [emitter][sample], lab frame
    std::vector<std::vector<double>> populations;  // [emitter][sample]
    std::vector<double> photon_norm;
    std::vector<Snapshot> snapshots;
    QuantumState final_state;
    double frame{0};
    double dry_run_drift_rate{0};
};

// Classic RK4 on d psi/dt = -i H psi - (gamma_p/2) P_photon psi.
Trajectory evolve(const CoupledHamiltonian& h, const QuantumState& psi0, const EvolveOptions& opt);

// Norm drift per unit time of a lossless dry run; throws DynamicsError above 1e-6.
double validate_timestep(const CoupledHamiltonian& h, const QuantumState& psi0, double dt, double frame,
                         double span, kernels::Exec exec);

double spectral_radius_bound(const SparseMatrix& h);

enum class KernelKind { exact, gaussian_lll, continuum, flat_markov };

// G(tau, r_n, r_m) for the emitters of a Volterra problem.
struct KernelSpec {
    KernelKind kind{KernelKind::exact};
    // exact
    const EigenDecomposition* eig{nullptr};
    std::vector<int> sites;
    // gaussian_lll: alpha exp(-U_B^2 tau^2/4) on the diagonal, channel at omega = 0,
    // so emitter frequencies are detunings; no cross terms.
    // continuum: LLL propagator between emitter positions.
    LandauAnalytics params;
    ContinuumKernel continuum;
    std::vector<std::pair<double, double>> positions;
    // flat_markov: amplitude decay rates
    std::vector<double> rates;
    // optional pre-tabulated table [(k*n + r)*n + c] on the solver grid
    std::vector<cplx> table;
    double table_dt{0};

    const char* name() const;
};

struct VolterraProblem {
    std::vector<double> omega;
    std::vector<double> g;
    std::vector<cplx> c0;
    double dt{0.01};
    double T{0};
    std::optional<double> frame;
    kernels::Exec exec{kernels::Exec::parallel};
};

struct VolterraResult {
    std::vector<double> t;
    std::vector<std::vector<cplx>> amplitudes;  // lab frame
    std::vector<std::vector<double>> populations;
};

std::vector<cplx> tabulate_kernel(const KernelSpec& k, int n, double dt, int steps, kernels::Exec exec);
VolterraResult volterra_solve(const KernelSpec& kernel, const VolterraProblem& problem);

// Gamma_e = (sqrt(pi)/2) g^2 alpha / U_B exp(-Delta^2/U_B^2)
double markov_rate(double g, double alpha, double U_B, double delta);

enum class Regime { weak, critical, strong };
struct RegimeInfo {
    Regime regime{Regime::weak};
    double ratio{0};
};
const char* to_string(Regime r);
RegimeInfo classify_regime(double g, double alpha, double U_B);

}  // namespace hallwave
