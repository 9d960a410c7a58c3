#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "krylab/analysis.hpp"
#include "krylab/config.hpp"
#include "krylab/dynamics.hpp"
#include "krylab/timescales.hpp"

namespace krylab {

/// One (order, dt) cell of a figure experiment.
struct CellResult {
    GeneratorOrder order = GeneratorOrder::finite(1);
    double dt = 0.0;
    /// dt / dt_scr
    double dt_over_dt_scr = 0.0;
    std::size_t grade = 0;
    ComplexityTrace trace;
    std::vector<double> delta_c;  // C_p - C_1
    ProjectedMatrix hessian;
    BandwidthProfile band;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::optional<TimescaleReport> timescales;
    std::optional<Theorem1Report> theorem;
    std::vector<CellResult> cells;
    std::vector<std::string> warnings;
};

/// KRYLOV_LAB_THREADS when set to a positive integer, else hardware concurrency.
unsigned worker_threads();

/// Runs the experiment in memory. Cells are independent and computed in
/// parallel; the result order is (dt, order) as listed in the config.
ExperimentResult compute_experiment(const ExperimentConfig& cfg);

std::string trace_file_name(const CellResult& cell);
std::string hessian_file_name(const CellResult& cell);

/// CSV renderings (RFC 4180, '\n' line endings, header row, %.17g floats).
std::string trace_csv(const CellResult& cell, double tau_h);
std::string hessian_csv(const CellResult& cell);

/// Writes trace/hessian CSVs per cell, then timescales.json and/or
/// theorem1.json. Returns the paths written. Re-checks the row-sum
/// invariant (1e-9) before writing anything.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result);

/// compute_experiment followed by write_outputs.
std::vector<std::filesystem::path> run(const ExperimentConfig& cfg);

} // namespace krylab
