// fig12_search - pick seed and emitter pairs on a smooth random landscape for the percolation presets
#include "hallwave/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>

using namespace hallwave;

int main(int argc, char** argv) {
    CLI::App app{"scan seeds for matched / mismatched emitter pairs on one equipotential"};
    int n = 21, seeds = 8, per_seed = 2;
    double U0 = 0.1, scale = 0.05, alpha = 0.1, T = 400;
    std::string mode = "matched";
    app.add_option("--size", n);
    app.add_option("--seeds", seeds);
    app.add_option("--per-seed", per_seed);
    app.add_option("--U0", U0);
    app.add_option("--scale", scale);
    app.add_option("--T", T);
    app.add_option("--mode", mode)->check(CLI::IsMember({"matched", "mismatched"}));
    CLI11_PARSE(app, argc, argv);

    const auto p = LandauAnalytics::make(alpha, U0);
    for (int seed = 0; seed < seeds; ++seed) {
        LatticeSetup s;
        s.geometry = LatticeGeometry::make(n, n, Boundary::open, Boundary::open);
        s.alpha = alpha;
        s.potential = PotentialSpec{SumPotential{{PotentialSpec{LinearPotential{U0}},
                                                  PotentialSpec{SmoothRandomPotential{3 * p.l_B, scale}}}}};
        s.seed = static_cast<std::uint64_t>(seed);
        const auto lat = build_lattice(s);
        int found = 0;
        for (int y1 = 2; y1 <= 5 && found < per_seed; ++y1) {
            for (int x1 = 4; x1 <= n - 5 && found < per_seed; x1 += 3) {
                const auto f1 = local_field(lat.potential, alpha, x1, y1);
                for (int y2 = y1 + 7; y2 <= n - 3 && found < per_seed; ++y2) {
                    for (int x2 = 3; x2 <= n - 4 && found < per_seed; ++x2) {
                        const auto f2 = local_field(lat.potential, alpha, x2, y2);
                        const double r = f2.U_B_tilde / f1.U_B_tilde;
                        const bool want = mode == "matched" ? std::abs(r - 1) < 0.04 : (r > 1.8 || r < 0.55);
                        if (!want || std::abs(f2.omega_ch_tilde - f1.omega_ch_tilde) > 0.1 * f1.U_B_tilde) continue;
                        if (!equipotential_connected(lat.potential, alpha, x1, y1, x2, y2, f1.omega_ch_tilde,
                                                     0.5 * f1.U_B_tilde)) {
                            continue;
                        }
                        EmitterPlacement a{x1, y1};
                        EmitterPlacement b{x2, y2};
                        b.resonance_from = 0;
                        const auto em = resolve_emitters(lat, {a, b});
                        TransferConfig tc;
                        tc.lattice = s;
                        tc.emitters = {a, b};
                        tc.dynamics.T = T;
                        tc.dynamics.record_stride = 10;
                        const auto rep = run_transfer(lat, em, tc);
                        std::printf("seed %d (%d,%d)->(%d,%d) ratio %.3f F %.4f t* %.1f criteria %d%d%d%d\n", seed,
                                    x1, y1, x2, y2, r, rep.F, rep.t_star, rep.criteria.resonance,
                                    rep.criteria.coupling, rep.criteria.gradient, rep.criteria.connected);
                        std::fflush(stdout);
                        ++found;
                    }
                }
            }
        }
    }
}
