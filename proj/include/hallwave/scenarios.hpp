// scenarios.hpp - figure-level experiments: emission, revivals, transfer, sweeps, beam splitter
#pragma once

#include "hallwave/dynamics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hallwave {

struct LatticeSetup {
    LatticeGeometry geometry;
    double alpha{0.1};
    PotentialSpec potential{LinearPotential{}};
    std::optional<std::uint64_t> seed;
};

// U0 of the linear part of a potential (sum terms added), 0 if none.
double linear_U0(const PotentialSpec& spec);

struct BuiltLattice {
    GaugeField gauge;
    PotentialField potential;
    HoppingOperator h;
    LandauAnalytics params;  // alpha and linear U0
};

BuiltLattice build_lattice(const LatticeSetup& setup);

// Where the emitter frequency is anchored before adding `detuning`.
enum class ResonanceRef {
    lattice,      // LDOS centroid of the lattice modes near the local channel frequency
    channel,      // continuum channel frequency (local-field form)
    absolute      // detuning is the frequency itself
};

const char* to_string(ResonanceRef r);
ResonanceRef resonance_ref_from_string(const std::string& s);

struct EmitterPlacement {
    int x{0}, y{0};
    double detuning{0};
    ResonanceRef reference{ResonanceRef::lattice};
    std::optional<double> g;  // absolute coupling
    double g_factor{1.0};     // otherwise g = g_factor * U~_B(r) / sqrt(alpha)
    std::optional<int> resonance_from;  // reuse the resolved frequency of another emitter
};

struct ResolvedEmitter {
    Emitter emitter;
    double channel_frequency{0};  // continuum omega~_ch at the site
    double lattice_resonance{0};  // NaN unless calibrated
    double U_B_local{0};
    double gamma_e{0};            // markov_rate, NaN at zero gradient
    RegimeInfo regime;
};

// Calibration half-window is omega_B / 2 around the local channel frequency.
double lattice_resonance(const BuiltLattice& lat, int x, int y, double center);

std::vector<ResolvedEmitter> resolve_emitters(const BuiltLattice& lat, const std::vector<EmitterPlacement>& placements);

EmitterSet to_emitter_set(const std::vector<ResolvedEmitter>& r);

struct DynamicsSettings {
    double dt{0.01};
    double T{0};
    double gamma_p{0};
    std::vector<double> snapshot_times;
    int record_stride{1};
    kernels::Exec exec{kernels::Exec::parallel};
    bool validate{true};
};

struct WavepacketMetrics {
    double t{0};
    double norm{0};
    double x_mean{0}, y_offset_mean{0};
    double sigma_x{0}, sigma_y{0};
    double skew_kelly{0}, skew_bowley{0}, skew_moment{0};
    double leakage{0};
    int offset_lo{0};               // h_y[k] is the marginal at offset offset_lo + k
    std::vector<double> h_y;
};

// y offsets are taken relative to y_e along `direction` (+1 or -1), wrapped into
// [-Ny/4, 3Ny/4) on periodic lattices.
WavepacketMetrics packet_metrics(const LatticeGeometry& g, const std::vector<double>& density, int x_e, int y_e,
                                 double l_B, int direction = +1);

// Quantile of a histogram whose bin k covers [lo + k - 1/2, lo + k + 1/2).
double histogram_quantile(const std::vector<double>& h, int lo, double q);

// Population decay rate from a log-linear least-squares fit on [t0, t1].
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& p, double t0, double t1);

// Length scale of an exponential fit to h over offsets [o0, o1].
double fit_tail_length(const WavepacketMetrics& m, int o0, int o1);

struct EmissionConfig {
    LatticeSetup lattice;
    EmitterPlacement emitter;
    DynamicsSettings dynamics;
};

struct EmissionResult {
    ResolvedEmitter emitter;
    Trajectory trajectory;
    std::vector<WavepacketMetrics> metrics;
    std::vector<std::string> warnings;
    LandauAnalytics params;
};

EmissionResult run_emission(const EmissionConfig& cfg);

struct RevivalReport {
    double P_rev{0};
    double t_peak{0};            // time of the P_e maximum
    double capture_lag{0};       // from capture_lag()
    double tau_rev_measured{0};  // t_peak - capture_lag, the photon transit time
    double tau_rev_predicted{0};
    EmissionResult emission;
};

RevivalReport run_revival(const EmissionConfig& cfg);
// Open lattices: same window around tau_rev, default Ny / c_H.
RevivalReport run_loop_revival(const EmissionConfig& cfg, std::optional<double> tau_rev = std::nullopt);
// How far the P_e revival peak trails the photon transit time: emission and re-absorption are not
// instantaneous. Measured on the continuum channel, where the transit time is exact, so it does not
// depend on the lattice being analysed.
double capture_lag(const LandauAnalytics& p, double g, double detuning, double dt);
// Peaks of P over windows [n - 1/2, n + 1/2] tau for n = 1..count.
std::vector<std::pair<double, double>> revival_peaks(const Trajectory& tr, double tau, int count);

struct SweepGrid {
    std::string row_name, col_name, value_name;
    std::vector<double> rows, cols;
    std::vector<double> values;  // row-major
    std::vector<double> spread;  // per-cell standard deviation, empty if not applicable
    int ensemble{1};
    std::uint64_t base_seed{0};

    double at(std::size_t r, std::size_t c) const { return values[r * cols.size() + c]; }
};

struct RevivalMapConfig {
    double alpha{0.1};
    double U0{0.1};
    double Ly{200};
    std::vector<double> g_factors;     // rows, units of U_B / sqrt(alpha)
    std::vector<double> detunings;     // cols, units of U_B
    double dt{0.25};
    kernels::Exec exec{kernels::Exec::parallel};
};

SweepGrid revival_map(const RevivalMapConfig& cfg);

struct CriteriaReport {
    bool resonance{false}, coupling{false}, gradient{false}, connected{false};
    double resonance_margin{0};  // |d omega~_ch| / mean U~_B
    double coupling_margin{0};   // max_n |g_n sqrt(alpha) / U~_B(r_n) - 1|
    double gradient_margin{0};   // |U~_B1 - U~_B2| / mean U~_B
    double tolerance{0.05};
    double resonance_tolerance{0.5};

    bool all() const { return resonance && coupling && gradient; }
};

CriteriaReport check_transfer_criteria(const PotentialField& v, const std::vector<ResolvedEmitter>& emitters,
                                       double alpha, double tolerance = 0.05, double resonance_tolerance = 0.5);

// Sites within the omega~_ch band |omega~_ch - level| <= half_width, 4-connected.
bool equipotential_connected(const PotentialField& v, double alpha, int x1, int y1, int x2, int y2, double level,
                             double half_width);

struct TransferConfig {
    LatticeSetup lattice;
    std::vector<EmitterPlacement> emitters;  // [0] excited, [1] receiver
    DynamicsSettings dynamics;
    double scan_t0{0};
    std::optional<double> scan_t1;
};

struct TransferReport {
    double F{0};
    double t_star{0};
    double tau_T{0};  // NaN when the receiver is not downstream along the bulk channel
    CriteriaReport criteria;
    std::vector<ResolvedEmitter> emitters;
    Trajectory trajectory;
    LandauAnalytics params;
};

TransferReport run_transfer(const TransferConfig& cfg);
TransferReport run_transfer(const BuiltLattice& lat, const std::vector<ResolvedEmitter>& emitters,
                            const TransferConfig& cfg);

double predicted_transfer_time(const LatticeGeometry& g, const LandauAnalytics& p, int y1, int y2, double gamma_e);

struct DisorderSweepConfig {
    TransferConfig transfer;          // geometry, placements, dynamics template
    std::vector<double> U0s;          // rows
    std::vector<double> sigmas;       // cols
    int n_dis{20};
    std::uint64_t base_seed{1};
    double window_factor{2.0};        // scan and simulate to window_factor * tau_T
    int jobs{0};
};

SweepGrid disorder_sweep(const DisorderSweepConfig& cfg);

struct BeamSplitterConfig {
    LatticeSetup lattice;  // potential should contain a saddle
    double cx{15}, cy{15};
    EmitterPlacement emitter;
    DynamicsSettings dynamics;  // snapshot_times[0] is the analysis time
};

struct BeamSplitterReport {
    double NW{0}, SE{0}, back{0}, residual{0};
    double photon_norm{0};
    double skew_NW{0}, skew_SE{0};
    double t{0};
    EmissionResult emission;
};

BeamSplitterReport run_beam_splitter(const BeamSplitterConfig& cfg);

// Branch weights of a density map around (cx, cy) with dead-zone radius r_dead.
BeamSplitterReport split_weights(const LatticeGeometry& g, const std::vector<double>& density, double cx, double cy,
                                 double r_dead);

}  // namespace hallwave
