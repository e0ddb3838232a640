#include "hallwave/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hallwave {

namespace {

const std::map<std::string, std::vector<std::string>>& param_table() {
    static const std::map<std::string, std::vector<std::string>> t{
        {"spectrum", {"edge_width"}},
        {"ldos", {"x", "y", "omega_min", "omega_max", "points", "gamma", "analytic_ell"}},
        {"greens", {"from", "to", "t_max", "points", "model", "map_times"}},
        {"evolve", {"excite"}},
        {"kernel", {"model", "Ly"}},
        {"emission", {"fit_t0", "fit_t1"}},
        {"revival", {"peaks"}},
        {"obc_loop", {"tau"}},
        {"transfer", {"scan_t0", "scan_t1"}},
        {"revival_map", {"U0", "Ly", "g_factors", "detunings", "dt"}},
        {"disorder", {"U0s", "sigmas", "n_dis", "window_factor"}},
        {"beam_splitter", {"cx", "cy"}},
        {"excitation_spectrum", {"g_factors", "U0s", "omega_min", "omega_max", "points", "gamma"}},
    };
    return t;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(where + ": unknown key '" + it.key() + "' (allowed: " + list + ")");
        }
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where,
         std::vector<std::string>& defaults) {
    if (j.contains(key)) {
        try {
            return j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where + "." + key + ": " + e.what());
        }
    }
    defaults.push_back(where + "." + key + "=" + json(fallback).dump());
    return fallback;
}

template <class T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::vector<double> lin(double a, double b, int n) { return linspace(a, b, n); }

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : param_table()) v.push_back(k);
        return v;
    }();
    return names;
}

const std::vector<std::string>& scenario_param_keys(const std::string& scenario) {
    auto it = param_table().find(scenario);
    if (it == param_table().end()) {
        std::string list;
        for (const auto& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown scenario '" + scenario + "' (known: " + list + ")");
    }
    return it->second;
}

json scenario_defaults(const std::string& scenario, const LatticeSetup& lattice) {
    const auto& g = lattice.geometry;
    const double U0 = linear_U0(lattice.potential);
    if (scenario == "spectrum") return {{"edge_width", 2}};
    if (scenario == "ldos")
        return {{"x", g.nx / 2}, {"y", g.ny / 2}, {"omega_min", nullptr}, {"omega_max", nullptr},
                {"points", 2001}, {"gamma", 0.02}, {"analytic_ell", 0}};
    if (scenario == "greens")
        return {{"from", {g.nx / 2, g.ny / 2}}, {"to", {g.nx / 2, g.ny / 2}}, {"t_max", 50.0},
                {"points", 501}, {"model", "exact"}, {"map_times", json::array()}};
    if (scenario == "evolve") return {{"excite", 0}};
    if (scenario == "kernel") return {{"model", "exact"}, {"Ly", nullptr}};
    if (scenario == "emission") return {{"fit_t0", nullptr}, {"fit_t1", nullptr}};
    if (scenario == "revival") return {{"peaks", 2}};
    if (scenario == "obc_loop") return {{"tau", nullptr}};
    if (scenario == "transfer") return {{"scan_t0", 0.0}, {"scan_t1", nullptr}};
    if (scenario == "revival_map")
        return {{"U0", U0 != 0 ? U0 : 0.1}, {"Ly", 200.0}, {"g_factors", lin(0, 2, 11)},
                {"detunings", lin(-2.5, 2.5, 11)}, {"dt", 0.25}};
    if (scenario == "disorder")
        return {{"U0s", {U0}}, {"sigmas", {0.0}}, {"n_dis", 20}, {"window_factor", 2.0}};
    if (scenario == "beam_splitter") return {{"cx", (g.nx - 1) / 2.0}, {"cy", (g.ny - 1) / 2.0}};
    if (scenario == "excitation_spectrum")
        return {{"g_factors", lin(0, 3, 31)}, {"U0s", {U0}}, {"omega_min", nullptr}, {"omega_max", nullptr},
                {"points", 1001}, {"gamma", 0.015}};
    scenario_param_keys(scenario);  // throws
    return json::object();
}

json potential_to_json(const PotentialSpec& spec) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearPotential>) {
                return {{"type", "linear"}, {"U0", p.U0}, {"x0", p.x0}};
            } else if constexpr (std::is_same_v<T, ConfiningPotential>) {
                return {{"type", "confining"}, {"V0", p.V0}, {"p", p.p}};
            } else if constexpr (std::is_same_v<T, DisorderPotential>) {
                return {{"type", "disorder"}, {"sigma", p.sigma}};
            } else if constexpr (std::is_same_v<T, SaddlePotential>) {
                return {{"type", "saddle"}, {"U0", p.U0}, {"cx", p.cx}, {"cy", p.cy}};
            } else if constexpr (std::is_same_v<T, SmoothRandomPotential>) {
                return {{"type", "smooth_random"}, {"xi", p.xi}, {"gradient_scale", p.gradient_scale}};
            } else if constexpr (std::is_same_v<T, GridPotential>) {
                if (!p.source.empty()) return {{"type", "grid"}, {"path", p.source}};
                return {{"type", "grid"}, {"values", p.values}};
            } else {
                json terms = json::array();
                for (const auto& t : p.terms) terms.push_back(potential_to_json(t));
                return {{"type", "sum"}, {"terms", terms}};
            }
        },
        spec.kind);
}

namespace {

PotentialSpec potential_from_json_impl(const json& j, const std::string& where, std::vector<std::string>& d) {
    const auto type = require<std::string>(j, "type", where);
    PotentialSpec s;
    if (type == "linear") {
        check_keys(j, {"type", "U0", "x0"}, where);
        s.kind = LinearPotential{get_or(j, "U0", 0.0, where, d), get_or(j, "x0", 0.0, where, d)};
    } else if (type == "confining") {
        check_keys(j, {"type", "V0", "p"}, where);
        s.kind = ConfiningPotential{get_or(j, "V0", 4.0, where, d), get_or(j, "p", 4, where, d)};
    } else if (type == "disorder") {
        check_keys(j, {"type", "sigma"}, where);
        s.kind = DisorderPotential{require<double>(j, "sigma", where)};
    } else if (type == "saddle") {
        check_keys(j, {"type", "U0", "cx", "cy"}, where);
        s.kind = SaddlePotential{require<double>(j, "U0", where), require<double>(j, "cx", where),
                                 require<double>(j, "cy", where)};
    } else if (type == "smooth_random") {
        check_keys(j, {"type", "xi", "gradient_scale"}, where);
        s.kind = SmoothRandomPotential{require<double>(j, "xi", where), require<double>(j, "gradient_scale", where)};
    } else if (type == "grid") {
        check_keys(j, {"type", "path", "values"}, where);
        if (j.contains("path")) {
            s.kind = load_grid_potential(j.at("path").get<std::string>());
        } else {
            GridPotential gp;
            for (const auto& row : require<std::vector<std::vector<double>>>(j, "values", where)) {
                gp.values.insert(gp.values.end(), row.begin(), row.end());
            }
            s.kind = std::move(gp);
        }
    } else if (type == "sum") {
        check_keys(j, {"type", "terms"}, where);
        SumPotential sum;
        const auto& terms = j.at("terms");
        if (!terms.is_array()) throw ConfigError(where + ".terms: expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            sum.terms.push_back(potential_from_json_impl(terms[i], where + ".terms[" + std::to_string(i) + "]", d));
        }
        s.kind = std::move(sum);
    } else {
        throw ConfigError(where + ": unknown potential type '" + type +
                          "' (expected linear|confining|disorder|saddle|smooth_random|grid|sum)");
    }
    return s;
}

}  // namespace

PotentialSpec potential_from_json(const json& j, const std::string& where) {
    std::vector<std::string> d;
    return potential_from_json_impl(j, where, d);
}

RunConfig parse_config(const json& doc) {
    RunConfig c;
    auto& d = c.defaults_applied;
    check_keys(doc, {"name", "scenario", "lattice", "potential", "emitters", "dynamics", "params", "seed", "output"},
               "config");
    c.name = get_or<std::string>(doc, "name", "run", "config", d);
    c.scenario = get_or<std::string>(doc, "scenario", "spectrum", "config", d);
    const auto& keys = scenario_param_keys(c.scenario);

    const auto lat = require<json>(doc, "lattice", "config");
    check_keys(lat, {"nx", "ny", "bc_x", "bc_y", "alpha"}, "lattice");
    const int nx = require<int>(lat, "nx", "lattice");
    const int ny = require<int>(lat, "ny", "lattice");
    const auto bx = boundary_from_string(get_or<std::string>(lat, "bc_x", "open", "lattice", d));
    const auto by = boundary_from_string(get_or<std::string>(lat, "bc_y", "open", "lattice", d));
    c.lattice.geometry = LatticeGeometry::make(nx, ny, bx, by);
    c.lattice.alpha = require<double>(lat, "alpha", "lattice");
    build_gauge(c.lattice.geometry, c.lattice.alpha);  // gauge-consistency check

    if (doc.contains("potential")) {
        c.lattice.potential = potential_from_json_impl(doc.at("potential"), "potential", d);
    } else {
        c.lattice.potential.kind = LinearPotential{0.0, 0.0};
        d.push_back("potential={\"type\":\"linear\",\"U0\":0}");
    }
    if (auto* gp = std::get_if<GridPotential>(&c.lattice.potential.kind)) {
        if (static_cast<int>(gp->values.size()) != c.lattice.geometry.sites()) {
            throw ConfigError("potential grid has " + std::to_string(gp->values.size()) + " values, lattice has " +
                              std::to_string(c.lattice.geometry.sites()) + " sites");
        }
    }

    c.seed = get_or<std::uint64_t>(doc, "seed", 0, "config", d);
    if (c.lattice.potential.stochastic()) c.lattice.seed = c.seed;

    if (doc.contains("emitters")) {
        const auto& em = doc.at("emitters");
        if (!em.is_array()) throw ConfigError("emitters: expected an array");
        for (std::size_t i = 0; i < em.size(); ++i) {
            const auto where = "emitters[" + std::to_string(i) + "]";
            const auto& e = em[i];
            check_keys(e, {"x", "y", "detuning", "reference", "g", "g_factor", "resonance_from"}, where);
            EmitterPlacement p;
            p.x = require<int>(e, "x", where);
            p.y = require<int>(e, "y", where);
            if (!c.lattice.geometry.contains(p.x, p.y)) {
                throw ConfigError(where + ": site (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                  ") outside 0 <= x < " + std::to_string(nx) + ", 0 <= y < " + std::to_string(ny));
            }
            p.detuning = get_or(e, "detuning", 0.0, where, d);
            p.reference = resonance_ref_from_string(get_or<std::string>(e, "reference", "lattice", where, d));
            if (e.contains("g")) {
                if (e.contains("g_factor")) throw ConfigError(where + ": give either g or g_factor, not both");
                p.g = require<double>(e, "g", where);
                if (*p.g < 0) throw ConfigError(where + ": g >= 0 violated");
            } else {
                p.g_factor = get_or(e, "g_factor", 1.0, where, d);
            }
            if (e.contains("resonance_from")) {
                const int r = require<int>(e, "resonance_from", where);
                if (r < 0 || r >= static_cast<int>(i)) {
                    throw ConfigError(where + ".resonance_from must name an earlier emitter");
                }
                p.resonance_from = r;
            }
            c.emitters.push_back(p);
        }
    }

    const json dyn = doc.contains("dynamics") ? doc.at("dynamics") : json::object();
    check_keys(dyn, {"dt", "T", "gamma_p", "snapshot_times", "record_stride", "validate", "exec"}, "dynamics");
    c.dynamics.dt = get_or(dyn, "dt", 0.01, "dynamics", d);
    c.dynamics.T = get_or(dyn, "T", 0.0, "dynamics", d);
    c.dynamics.gamma_p = get_or(dyn, "gamma_p", 0.0, "dynamics", d);
    c.dynamics.snapshot_times = get_or(dyn, "snapshot_times", std::vector<double>{}, "dynamics", d);
    c.dynamics.record_stride = get_or(dyn, "record_stride", 1, "dynamics", d);
    c.dynamics.validate = get_or(dyn, "validate", true, "dynamics", d);
    const auto exec = get_or<std::string>(dyn, "exec", "parallel", "dynamics", d);
    if (exec != "parallel" && exec != "serial") throw ConfigError("dynamics.exec: expected parallel|serial");
    c.dynamics.exec = exec == "serial" ? kernels::Exec::serial : kernels::Exec::parallel;
    if (!(c.dynamics.dt > 0)) throw ConfigError("dynamics.dt > 0 violated");
    if (c.dynamics.T < 0) throw ConfigError("dynamics.T >= 0 violated");
    if (c.dynamics.gamma_p < 0) throw ConfigError("dynamics.gamma_p >= 0 violated");
    if (c.dynamics.record_stride < 1) throw ConfigError("dynamics.record_stride >= 1 violated");
    for (double t : c.dynamics.snapshot_times) {
        if (t < 0 || t > c.dynamics.T) {
            throw ConfigError("snapshot time " + std::to_string(t) + " outside 0 <= t <= T = " +
                              std::to_string(c.dynamics.T));
        }
    }

    const json params = doc.contains("params") ? doc.at("params") : json::object();
    check_keys(params, std::set<std::string>(keys.begin(), keys.end()), "params");
    c.params = scenario_defaults(c.scenario, c.lattice);
    for (auto it = c.params.begin(); it != c.params.end(); ++it) {
        if (params.contains(it.key())) {
            *it = params.at(it.key());
        } else {
            d.push_back("params." + it.key() + "=" + it.value().dump());
        }
    }

    c.output = get_or<std::string>(doc, "output", "runs/" + c.name, "config", d);
    return c;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const RunConfig& c) {
    json j;
    j["name"] = c.name;
    j["scenario"] = c.scenario;
    const auto& g = c.lattice.geometry;
    j["lattice"] = {{"nx", g.nx}, {"ny", g.ny}, {"bc_x", to_string(g.bc_x)}, {"bc_y", to_string(g.bc_y)},
                    {"alpha", c.lattice.alpha}};
    j["potential"] = potential_to_json(c.lattice.potential);
    json em = json::array();
    for (const auto& e : c.emitters) {
        json o{{"x", e.x}, {"y", e.y}, {"detuning", e.detuning}, {"reference", to_string(e.reference)}};
        if (e.g) {
            o["g"] = *e.g;
        } else {
            o["g_factor"] = e.g_factor;
        }
        if (e.resonance_from) o["resonance_from"] = *e.resonance_from;
        em.push_back(o);
    }
    j["emitters"] = em;
    const auto& dy = c.dynamics;
    j["dynamics"] = {{"dt", dy.dt},
                     {"T", dy.T},
                     {"gamma_p", dy.gamma_p},
                     {"snapshot_times", dy.snapshot_times},
                     {"record_stride", dy.record_stride},
                     {"validate", dy.validate},
                     {"exec", dy.exec == kernels::Exec::serial ? "serial" : "parallel"}};
    j["params"] = c.params;
    j["seed"] = c.seed;
    j["output"] = c.output;
    return j;
}

}  // namespace hallwave
