#include "hallwave/presets.hpp"

namespace hallwave {

// Layouts are mirrored in y (y' = Ny - 1 - y) where a reference layout propagates toward -y;
// here photons drift toward +y for U0 > 0.
const std::vector<Preset>& presets() {
    static const std::vector<Preset> list{
        {"fig1c", "spectrum vs mode center, alpha=1/10, 40x40, U0=0.05, periodic y", R"({
  "name": "fig1c", "scenario": "spectrum",
  "lattice": {"nx": 40, "ny": 40, "bc_x": "open", "bc_y": "periodic", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.05}
})"},
        {"fig2", "Markovian emission, alpha=1/20, 31x100, U0=0.001, g=0.4 U_B/sqrt(alpha)", R"({
  "name": "fig2", "scenario": "emission",
  "lattice": {"nx": 31, "ny": 100, "bc_x": "open", "bc_y": "periodic", "alpha": 0.05},
  "potential": {"type": "linear", "U0": 0.001},
  "emitters": [{"x": 15, "y": 49, "g_factor": 0.4}],
  "dynamics": {"dt": 0.05, "T": 5930, "snapshot_times": [5930], "record_stride": 100},
  "params": {"fit_t0": 1976, "fit_t1": 5930}
})"},
        {"fig3a", "bound-state Rabi oscillations, g=2 U_B/sqrt(alpha), alpha=1/20, 40x40, U0=0.01", R"({
  "name": "fig3a", "scenario": "emission",
  "lattice": {"nx": 40, "ny": 40, "bc_x": "open", "bc_y": "periodic", "alpha": 0.05},
  "potential": {"type": "linear", "U0": 0.01},
  "emitters": [{"x": 20, "y": 20, "g_factor": 2}],
  "dynamics": {"dt": 0.05, "T": 2000, "record_stride": 10}
})"},
        {"fig3b", "bound-state Rabi oscillations, g=8 U_B/sqrt(alpha), alpha=1/20, 40x40, U0=0.01", R"({
  "name": "fig3b", "scenario": "emission",
  "lattice": {"nx": 40, "ny": 40, "bc_x": "open", "bc_y": "periodic", "alpha": 0.05},
  "potential": {"type": "linear", "U0": 0.01},
  "emitters": [{"x": 20, "y": 20, "g_factor": 8}],
  "dynamics": {"dt": 0.05, "T": 2000, "record_stride": 10}
})"},
        {"fig4", "emitter excitation spectrum vs g for U_B/w_B ~ 0.05, 0.25, 1; 30x30, gamma=0.015", R"({
  "name": "fig4", "scenario": "excitation_spectrum",
  "lattice": {"nx": 30, "ny": 30, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.05},
  "emitters": [{"x": 15, "y": 15}],
  "params": {"U0s": [0.05, 0.25, 1.0], "g_factors": [0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2, 2.5, 3],
             "points": 1201, "gamma": 0.015}
})"},
        {"fig4plus", "critically coupled emission, alpha=1/10, 31x31, U0=0.1, snapshot at t=202", R"({
  "name": "fig4plus", "scenario": "emission",
  "lattice": {"nx": 31, "ny": 31, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 15, "y": 15, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 202, "snapshot_times": [50, 100, 202], "record_stride": 10},
  "params": {"fit_t0": 5, "fit_t1": 30}
})"},
        {"fig4plus_c", "h_t(y) of a critically coupled emitter, 20x80 periodic y, t=64", R"({
  "name": "fig4plus_c", "scenario": "emission",
  "lattice": {"nx": 20, "ny": 80, "bc_x": "open", "bc_y": "periodic", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 10, "y": 9, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 64, "snapshot_times": [64], "record_stride": 10}
})"},
        {"fig4plus_c_weak", "h_t(y) of a weakly coupled emitter (g=0.3 U_B/sqrt(alpha)), 20x80, t=64", R"({
  "name": "fig4plus_c_weak", "scenario": "emission",
  "lattice": {"nx": 20, "ny": 80, "bc_x": "open", "bc_y": "periodic", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 10, "y": 9, "g_factor": 0.3}],
  "dynamics": {"dt": 0.01, "T": 64, "snapshot_times": [64], "record_stride": 10}
})"},
        {"fig5", "revival of a critically coupled emitter, 31x61 periodic y, U0=0.1", R"({
  "name": "fig5", "scenario": "revival",
  "lattice": {"nx": 31, "ny": 61, "bc_x": "open", "bc_y": "periodic", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 15, "y": 7, "g_factor": 1}],
  "dynamics": {"dt": 0.02, "T": 1000, "snapshot_times": [100, 383], "record_stride": 5}
})"},
        {"fig5_weak", "revival of a weakly coupled emitter (g=0.3 U_B/sqrt(alpha)), 31x61 periodic y", R"({
  "name": "fig5_weak", "scenario": "revival",
  "lattice": {"nx": 31, "ny": 61, "bc_x": "open", "bc_y": "periodic", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 15, "y": 7, "g_factor": 0.3}],
  "dynamics": {"dt": 0.02, "T": 1000, "snapshot_times": [100, 383], "record_stride": 5}
})"},
        {"fig5pp", "P_rev map over g and detuning, continuum kernel, L_y=200, 11x11 grid", R"({
  "name": "fig5pp", "scenario": "revival_map",
  "lattice": {"nx": 1, "ny": 1, "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "params": {"U0": 0.1, "Ly": 200, "dt": 0.25}
})"},
        {"fig7", "revival along the edge loop of a 21x21 open lattice, emitter at the center", R"({
  "name": "fig7", "scenario": "obc_loop",
  "lattice": {"nx": 21, "ny": 21, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 10, "y": 10, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 330, "snapshot_times": [33, 66, 132], "record_stride": 5}
})"},
        {"fig10a", "edge-channel transfer at U0=0, 41x41 open, g=0.1 w_B/sqrt(alpha)", R"({
  "name": "fig10a", "scenario": "transfer",
  "lattice": {"nx": 41, "ny": 41, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.0},
  "emitters": [{"x": 20, "y": 0, "reference": "channel", "detuning": 0.12566370614359174, "g": 0.39738353063184886},
               {"x": 20, "y": 40, "reference": "channel", "detuning": 0.12566370614359174, "g": 0.39738353063184886}],
  "dynamics": {"dt": 0.01, "T": 600, "record_stride": 10}
})"},
        {"fig10b", "bulk transfer, 41x41 open, U0=0.05, critical coupling", R"({
  "name": "fig10b", "scenario": "transfer",
  "lattice": {"nx": 41, "ny": 41, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.05},
  "emitters": [{"x": 20, "y": 4, "g_factor": 1}, {"x": 20, "y": 35, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 700, "record_stride": 10}
})"},
        {"fig10c", "bulk emitters linked through the edge, 41x41 open, U0=0.05, critical coupling", R"({
  "name": "fig10c", "scenario": "transfer",
  "lattice": {"nx": 41, "ny": 41, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.05},
  "emitters": [{"x": 20, "y": 35, "g_factor": 1}, {"x": 20, "y": 4, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 500, "record_stride": 10}
})"},
        {"fig11half", "disorder-averaged transfer infidelity over U0 and sigma_p, 21x21, N_dis=20", R"({
  "name": "fig11half", "scenario": "disorder",
  "lattice": {"nx": 21, "ny": 21, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 10, "y": 3, "g_factor": 1}, {"x": 10, "y": 16, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "gamma_p": 1e-5, "record_stride": 10},
  "params": {"U0s": [0.02, 0.05, 0.1, 0.2, 0.3], "sigmas": [0, 0.01, 0.03, 0.1, 0.3], "n_dis": 20},
  "seed": 20240611
})"},
        {"fig11", "chiral beam splitter on a saddle potential, 31x31, U0=0.1", R"({
  "name": "fig11", "scenario": "beam_splitter",
  "lattice": {"nx": 31, "ny": 31, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "saddle", "U0": 0.1, "cx": 15, "cy": 15},
  "emitters": [{"x": 21, "y": 21, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 100, "snapshot_times": [100], "record_stride": 10},
  "params": {"cx": 15, "cy": 15}
})"},
        {"fig12a", "transfer along an equipotential of a smooth random landscape, matched gradients", R"({
  "name": "fig12a", "scenario": "transfer",
  "lattice": {"nx": 21, "ny": 21, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "sum", "terms": [{"type": "linear", "U0": 0.1},
                {"type": "smooth_random", "xi": 3.7846987830302403, "gradient_scale": 0.05}]},
  "emitters": [{"x": 10, "y": 2, "g_factor": 1}, {"x": 8, "y": 12, "g_factor": 1, "resonance_from": 0}],
  "dynamics": {"dt": 0.01, "T": 400, "record_stride": 10},
  "seed": 0
})"},
        {"fig12b", "transfer along an equipotential of a smooth random landscape, mismatched gradients", R"({
  "name": "fig12b", "scenario": "transfer",
  "lattice": {"nx": 21, "ny": 21, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "sum", "terms": [{"type": "linear", "U0": 0.1},
                {"type": "smooth_random", "xi": 3.7846987830302403, "gradient_scale": 0.05}]},
  "emitters": [{"x": 4, "y": 2, "g_factor": 1}, {"x": 4, "y": 11, "g_factor": 1, "resonance_from": 0}],
  "dynamics": {"dt": 0.01, "T": 400, "record_stride": 10},
  "seed": 1
})"},
        {"hardware", "superconducting-circuit numbers: 20x20, U0=0.1, alpha=0.1, Q=1e5 at 5 GHz, J/2pi=100 MHz", R"({
  "name": "hardware", "scenario": "transfer",
  "lattice": {"nx": 20, "ny": 20, "bc_x": "open", "bc_y": "open", "alpha": 0.1},
  "potential": {"type": "linear", "U0": 0.1},
  "emitters": [{"x": 10, "y": 3, "g_factor": 1}, {"x": 10, "y": 16, "g_factor": 1}],
  "dynamics": {"dt": 0.01, "T": 300, "gamma_p": 5e-4, "record_stride": 10}
})"},
    };
    return list;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

RunConfig preset_config(const std::string& name) { return parse_config(find_preset(name).json_text); }

}  // namespace hallwave
