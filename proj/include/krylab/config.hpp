#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "krylab/krylov.hpp"

namespace krylab {

enum class Experiment { Fig1Small, Fig2Gue, Theorem1 };
enum class DtMode { Absolute, ScramblingMultiple };
enum class TimeUnit { Absolute, Heisenberg };

std::string to_string(Experiment e);
std::string to_string(DtMode m);
std::string to_string(TimeUnit u);

/// Fully resolved experiment description. Every field has a value once
/// parse_config returns; defaults depend on `experiment`.
struct ExperimentConfig {
    Experiment experiment = Experiment::Fig1Small;
    std::size_t dim = 3;
    std::uint64_t seed = 0;
    std::vector<GeneratorOrder> orders;
    DtMode dt_mode = DtMode::Absolute;
    /// Absolute dt values, or multiples alpha of dt_scr.
    std::vector<double> dt_values;
    double t_start = 0.0;
    double t_stop = 6.0;
    std::size_t t_points = 601;
    /// Heisenberg: t_start/t_stop are in units of tau_H.
    TimeUnit time_unit = TimeUnit::Absolute;
    bool normalize = true;
    bool conjugate_generator = false;
    double deflation_tol = 1e-8;
    double support_threshold = 1e-6;
    std::size_t trials = 100;
    std::size_t tau_points = 20;
    double tau_min_fraction = 1e-2;
    std::filesystem::path output_dir = "out";
};

ExperimentConfig default_config(Experiment e);

/// Parses `key = value` lines; `#` starts a comment. `experiment` selects the
/// defaults, every other key overrides one field. Unknown or repeated keys,
/// malformed values and violated invariants raise ConfigError with the source
/// name and line number.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks cross-field invariants (baseline order present, dt_mode values
/// positive, grid valid, ...). Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

/// Every field in `key = value` form, parseable by parse_config.
std::string effective_config_text(const ExperimentConfig& cfg);

} // namespace krylab
