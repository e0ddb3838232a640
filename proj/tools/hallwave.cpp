// hallwave - command-line front end
#include "hallwave/presets.hpp"
#include "hallwave/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hallwave;
namespace fs = std::filesystem;

namespace {

int env_jobs() {
    if (const char* s = std::getenv("HALLWAVE_JOBS")) return std::atoi(s);
    return 0;
}

fs::path out_dir_for(const RunConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* s = std::getenv("HALLWAVE_OUT_DIR")) return fs::path(s) / cfg.name;
    return cfg.output;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

int execute(const RunConfig& cfg, const std::string& out, int jobs) {
    const auto dir = out_dir_for(cfg, out);
    const auto res = run(cfg, RunOptions{dir, jobs > 0 ? jobs : env_jobs()});
    std::cout << "wrote " << dir.string() << " (" << res.manifest["files"].size() << " files + manifest.json)\n";
    for (const auto& w : res.manifest["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    for (const auto& v : res.violations) std::cerr << "invariant violated: " << v << "\n";
    return res.violations.empty() ? 0 : 1;
}

int verify(const std::string& dir) {
    const auto m = json::parse(read_file(fs::path(dir) / "manifest.json"));
    int bad = 0;
    for (const auto& f : m.at("files")) {
        const auto name = f.at("name").get<std::string>();
        const auto sum = sha256_hex(read_file(fs::path(dir) / name));
        const bool ok = sum == f.at("sha256").get<std::string>();
        std::cout << (ok ? "ok       " : "MISMATCH ") << name << "\n";
        bad += !ok;
    }
    const double mis = manifest_derived_mismatch(m);
    std::cout << "derived-value mismatch " << format_double(mis) << (mis <= 1e-12 ? " ok" : " MISMATCH") << "\n";
    return (bad == 0 && mis <= 1e-12) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hallwave: photons in a synthetic magnetic field coupled to two-level emitters"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs,-j", jobs, "worker threads (default: HALLWAVE_JOBS or all cores)")->check(CLI::NonNegativeNumber);

    std::string config_path, out;
    std::function<int()> action;

    for (const char* name : {"spectrum", "ldos", "greens", "evolve", "kernel", "transfer"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario from a config file");
        sub->add_option("--config,-c", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out,-o", out, "output directory");
        sub->callback([&, name] {
            action = [&, name] {
                auto doc = read_json(config_path);
                doc["scenario"] = name;
                return execute(parse_config(doc), out, jobs);
            };
        });
    }

    std::string sweep_kind, preset_name;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep: revival_map or disorder");
    sweep->add_option("kind", sweep_kind, "revival_map | disorder")->required()->check(CLI::IsMember({"revival_map", "disorder"}));
    auto* sweep_src = sweep->add_option_group("source");
    sweep_src->add_option("--config,-c", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sweep_src->add_option("--preset,-p", preset_name, "named preset");
    sweep_src->require_option(1);
    sweep->add_option("--out,-o", out, "output directory");
    sweep->callback([&] {
        action = [&] {
            json doc = preset_name.empty() ? read_json(config_path) : json::parse(find_preset(preset_name).json_text);
            doc["scenario"] = sweep_kind;
            return execute(parse_config(doc), out, jobs);
        };
    });

    auto* scen = app.add_subcommand("scenario", "run a named preset");
    scen->add_option("name", preset_name, "preset name (see 'presets list')")->required();
    scen->add_option("--out,-o", out, "output directory");
    scen->callback([&] { action = [&] { return execute(preset_config(preset_name), out, jobs); }; });

    auto* runc = app.add_subcommand("run", "run any scenario from a config file");
    runc->add_option("--config,-c", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    runc->add_option("--out,-o", out, "output directory");
    runc->callback([&] { action = [&] { return execute(load_config(config_path), out, jobs); }; });

    auto* pre = app.add_subcommand("presets", "list, show or export presets");
    pre->require_subcommand(1);
    pre->add_subcommand("list", "list preset names")->callback([&] {
        action = [] {
            for (const auto& p : presets()) std::cout << p.name << "  " << p.description << "\n";
            return 0;
        };
    });
    std::string show_name;
    auto* show = pre->add_subcommand("show", "print a preset with defaults filled in");
    show->add_option("name", show_name)->required();
    show->callback([&] { action = [&] { std::cout << to_json(preset_config(show_name)).dump(2) << "\n"; return 0; }; });
    std::string export_dir;
    auto* exp = pre->add_subcommand("export", "write every preset as <dir>/<name>.json");
    exp->add_option("dir", export_dir)->required();
    exp->callback([&] {
        action = [&] {
            for (const auto& p : presets()) {
                parse_config(p.json_text);
                write_file_atomic(fs::path(export_dir) / (p.name + ".json"), json::parse(p.json_text).dump(2) + "\n");
            }
            return 0;
        };
    });

    std::string verify_dir;
    auto* ver = app.add_subcommand("verify", "check manifest checksums and derived values of a run directory");
    ver->add_option("dir", verify_dir)->required()->check(CLI::ExistingDirectory);
    ver->callback([&] { action = [&] { return verify(verify_dir); }; });

    CLI11_PARSE(app, argc, argv);
    try {
        return action ? action() : 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
