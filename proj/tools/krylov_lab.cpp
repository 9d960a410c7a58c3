// krylov-lab: seeded spread-complexity experiments.
//
//   krylov-lab run <config> [--conjugate-generator] [--output-dir DIR]
//   krylov-lab validate <config>
//   krylov-lab theorem1 --dim N --trials K --seed S [--tau-points P] [--output-dir DIR]
//
// Exit codes: 0 ok, 2 config error, 3 numeric error. Failures print a JSON
// error record on stderr.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "krylab/config.hpp"
#include "krylab/errors.hpp"
#include "krylab/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int report_error(const std::string& kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << std::endl;
    return code;
}

void print_outputs(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << f.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Krylov spread complexity under higher-order generators"};
    app.require_subcommand(1);

    std::string run_config;
    bool conjugate = false;
    std::string output_override;
    auto* run_cmd = app.add_subcommand("run", "run an experiment described by a config file");
    run_cmd->add_option("config", run_config, "config file (key = value lines)")->required();
    run_cmd->add_flag("--conjugate-generator", conjugate, "build generators with +i instead of -i");
    run_cmd->add_option("--output-dir", output_override, "override output_dir from the config");

    std::string validate_config_path;
    auto* validate_cmd = app.add_subcommand("validate", "print the effective config without running");
    validate_cmd->add_option("config", validate_config_path, "config file")->required();

    krylab::ExperimentConfig theorem_cfg = krylab::default_config(krylab::Experiment::Theorem1);
    std::string theorem_output;
    auto* theorem_cmd = app.add_subcommand("theorem1", "sweep the first-order vs infinite-order comparison");
    theorem_cmd->add_option("--dim", theorem_cfg.dim, "Hilbert space dimension")->capture_default_str();
    theorem_cmd->add_option("--trials", theorem_cfg.trials, "number of GUE samples")->capture_default_str();
    theorem_cmd->add_option("--seed", theorem_cfg.seed, "base seed")->capture_default_str();
    theorem_cmd->add_option("--tau-points", theorem_cfg.tau_points, "log-spaced tau values in (0, tau_H]")
        ->capture_default_str();
    theorem_cmd->add_option("--tau-min-fraction", theorem_cfg.tau_min_fraction, "smallest tau / tau_H")
        ->capture_default_str();
    theorem_cmd->add_flag("--conjugate-generator", theorem_cfg.conjugate_generator,
                          "build e^{+iH dt} instead of e^{-iH dt}");
    theorem_cmd->add_option("--output-dir", theorem_output, "directory for theorem1.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (*validate_cmd) {
            std::cout << krylab::effective_config_text(krylab::load_config(validate_config_path));
            return 0;
        }
        if (*run_cmd) {
            krylab::ExperimentConfig cfg = krylab::load_config(run_config);
            if (conjugate) cfg.conjugate_generator = true;
            if (!output_override.empty()) cfg.output_dir = output_override;
            print_outputs(krylab::run(cfg));
            return 0;
        }
        if (*theorem_cmd) {
            if (!theorem_output.empty()) theorem_cfg.output_dir = theorem_output;
            krylab::validate_config(theorem_cfg);
            const auto result = krylab::compute_experiment(theorem_cfg);
            const auto& r = *result.theorem;
            std::cout << "trials " << r.trials << ", violations " << r.violations << ", min margin " << r.min_margin
                      << ", max |kappa2_inf| " << r.max_kappa2_inf << ", max transfer defect "
                      << r.max_transfer_defect << '\n';
            print_outputs(krylab::write_outputs(result));
            return r.violations == 0 ? 0 : kExitNumeric;
        }
    } catch (const krylab::ConfigError& e) {
        return report_error(e.kind(), e.what(), kExitConfig);
    } catch (const krylab::StructuralError& e) {
        return report_error(e.kind(), e.what(), kExitConfig);
    } catch (const krylab::NumericError& e) {
        return report_error(e.kind(), e.what(), kExitNumeric);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 1);
    }
    return 0;
}
