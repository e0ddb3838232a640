// run.hpp - scenario dispatch, output writing, config adapters
#pragma once

#include "hallwave/output.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hallwave {

inline constexpr const char* kArtifactVersion = "hallwave 1.0.0";

struct RunOptions {
    std::filesystem::path out_dir;
    int jobs{0};  // 0: OpenMP default
};

struct RunOutcome {
    json manifest;
    std::vector<std::string> violations;  // invariant violations; nonempty means failure
};

// Runs the scenario and writes its files plus manifest.json into out_dir.
RunOutcome run(const RunConfig& cfg, const RunOptions& opt);

EmissionConfig to_emission_config(const RunConfig& cfg);
TransferConfig to_transfer_config(const RunConfig& cfg);
RevivalMapConfig to_revival_map_config(const RunConfig& cfg);
DisorderSweepConfig to_disorder_config(const RunConfig& cfg, int jobs = 0);
BeamSplitterConfig to_beam_splitter_config(const RunConfig& cfg);

struct SpectrumReport {
    EigenDecomposition eig;
    std::vector<double> mean_x;
    std::vector<int> edge_flag;
    int lll_bulk_modes{0};
    double lll_max_deviation{0};  // |omega - omega_ch(<x>)| over bulk lowest-level modes
    double lll_mean_deviation{0};
};

// Bulk modes: margin < <x> < nx-1-margin and within `window` of the lowest-level line.
SpectrumReport spectrum_report(const BuiltLattice& lat, int edge_width = 2, double margin = 5, double window = 0.3);

struct ExcitationMap {
    std::vector<double> U0s, g, omega;  // g is absolute
    std::vector<double> S;              // [(u * g.size() + i) * omega.size() + w]
};

ExcitationMap excitation_map(const RunConfig& cfg);

}  // namespace hallwave
