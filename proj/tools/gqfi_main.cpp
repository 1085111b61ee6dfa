#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>

#include "gqfi/runner.hpp"

namespace {

int jobs_from_env() {
    const char* env = std::getenv("GQFI_JOBS");
    if (!env) return 0;
    const int j = std::atoi(env);
    return j > 0 ? j : 0;
}

int dispatch(gqfi::RunConfig cfg, const std::string& out_override, int jobs_override) {
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;
    else if (int j = jobs_from_env(); j > 0 && cfg.jobs == 1) cfg.jobs = j;
    for (const auto& path : gqfi::run(cfg)) std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gqfi: asymptotic information rates of continuously monitored bosonic arrays"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name;
    int jobs = 0;
    bool list_presets = false;

    const std::vector<std::string> modes = {"trajectory", "sweep",     "asymptotics", "validate",
                                            "bounds",     "dephasing", "skin"};
    for (const auto& mode : modes) {
        auto* sub = app.add_subcommand(mode, "run a " + mode + " config");
        sub->add_option("--config", config_path, "config file path")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--jobs", jobs, "worker threads for sweeps");
    }
    auto* preset = app.add_subcommand("preset", "run a built-in figure recipe");
    preset->add_option("name", preset_name, "preset name, e.g. fig2b");
    preset->add_flag("--list", list_presets, "list available presets");
    preset->add_option("--out", out_dir, "output directory");
    preset->add_option("--jobs", jobs, "worker threads for sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (preset->parsed()) {
            if (list_presets) {
                for (const auto& p : gqfi::figure_recipes())
                    std::printf("%-12s %s\n", p.name.c_str(), p.synopsis.c_str());
                return 0;
            }
            if (preset_name.empty()) throw gqfi::ConfigError("preset name required");
            const auto p = gqfi::find_preset(preset_name);
            return dispatch(gqfi::parse_config_text(p.config), out_dir, jobs);
        }
        const auto* sub = app.get_subcommands().front();
        gqfi::RunConfig cfg = gqfi::parse_config_file(config_path);
        if (cfg.mode != sub->get_name())
            throw gqfi::ConfigError("config mode '" + cfg.mode + "' does not match subcommand '" +
                                    sub->get_name() + "'");
        return dispatch(std::move(cfg), out_dir, jobs);
    } catch (const gqfi::ConfigError& e) {
        std::fprintf(stderr, "gqfi: config error: %s\n", e.what());
        return 1;
    } catch (const gqfi::Error& e) {
        std::fprintf(stderr, "gqfi: numerical failure [%s]: %s\n", e.code().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gqfi: %s\n", e.what());
        return 2;
    }
}
