#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "tether/cli/config.hpp"
#include "tether/cli/experiment.hpp"
#include "tether/cli/presets.hpp"
#include "tether/core/error.hpp"

namespace {

using namespace tether;
using namespace tether::cli;

struct RunRequest {
    std::string config_path;
    std::string preset;
    std::string output;
    bool quiet = false;
};

std::string describe(Mode mode) {
    switch (mode) {
        case Mode::Ibm2d: return "2D particle simulation";
        case Mode::Ibm1d: return "1D particle simulation with density estimates";
        case Mode::Macro1d: return "1D continuum model";
        case Mode::Stability: return "Linear stability of the homogeneous state";
        case Mode::Reconstruct: return "1D particle run with closure-based obstacle reconstruction";
        case Mode::VerifyAsymptotics: return "Check the expansion machinery against oracles";
        case Mode::Sweep: return "Parameter sweep over a base mode";
    }
    return {};
}

int run(Mode mode, const RunRequest& req) {
    if (!req.config_path.empty() && !req.preset.empty())
        throw ConfigError("give either a config file or --preset, not both");
    ExperimentConfig config;
    if (!req.config_path.empty()) config = load_config(req.config_path, &mode);
    else if (!req.preset.empty()) config = load_preset(req.preset, &mode);
    else config.mode = mode;
    if (!req.output.empty()) config.output = req.output;
    run_experiment(config, config.output, req.quiet ? nullptr : &std::cerr);
    if (!req.quiet) std::cerr << "outputs in " << config.output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-propelled particles among tethered obstacles: particle and continuum models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tether 0.1.0");

    RunRequest req;
    std::optional<Mode> chosen;
    for (Mode mode : all_modes()) {
        const std::string name(to_string(mode));
        auto* sub = app.add_subcommand(name, describe(mode));
        sub->add_option("config", req.config_path, "YAML configuration file")->check(CLI::ExistingFile);
        sub->add_option("-p,--preset", req.preset, "Use a built-in preset instead of a file");
        sub->add_option("-o,--output", req.output, "Output directory (overrides the config)");
        sub->add_flag("-q,--quiet", req.quiet, "No progress output");
        sub->callback([&chosen, mode] { chosen = mode; });
    }

    std::string show;
    auto* presets = app.add_subcommand("presets", "List built-in presets or print one");
    presets->add_option("name", show, "Preset to print as YAML");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (presets->parsed()) {
            if (show.empty()) {
                for (const auto& name : preset_names()) std::cout << name << '\n';
            } else {
                std::cout << preset_text(show);
            }
            return 0;
        }
        return run(*chosen, req);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
