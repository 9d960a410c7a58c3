#include "krylab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "krylab/ensemble.hpp"
#include "krylab/errors.hpp"

namespace krylab {

namespace {

constexpr double kRowSumTolerance = 1e-9;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Runs task(i) for i in [0, count) on up to worker_threads() threads and
// rethrows the first failure.
template <class Task>
void parallel_for(std::size_t count, Task task) {
    const std::size_t workers = std::min<std::size_t>(worker_threads(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

ExperimentResult compute_figure(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.config = cfg;
    const GeneratorSign sign = cfg.conjugate_generator ? GeneratorSign::Forward : GeneratorSign::Backward;

    const Hamiltonian h(sample_gue({cfg.dim, cfg.seed, cfg.normalize}));
    const InitialState init = uniform_eigenstate_superposition(h.spectrum);
    result.warnings = init.warnings;

    const KrylovBasis first = build_basis(h, GeneratorOrder::finite(1), 0.0, init.psi, cfg.deflation_tol);
    const TimescaleReport ts = compute_timescales(h, first.grade());
    result.timescales = ts;

    const double time_scale = cfg.time_unit == TimeUnit::Heisenberg ? ts.tau_H : 1.0;
    const TimeGrid grid(cfg.t_start * time_scale, cfg.t_stop * time_scale, cfg.t_points);
    const ComplexityTrace first_trace = amplitudes(first, h, init.psi, grid);

    struct CellSpec {
        GeneratorOrder order;
        double dt;
    };
    std::vector<CellSpec> specs;
    for (double v : cfg.dt_values) {
        const double dt = cfg.dt_mode == DtMode::Absolute ? v : v * ts.dt_scr;
        for (const auto& order : cfg.orders) specs.push_back({order, dt});
    }

    result.cells.resize(specs.size());
    parallel_for(specs.size(), [&](std::size_t i) {
        const CellSpec& spec = specs[i];
        CellResult& cell = result.cells[i];
        cell.order = spec.order;
        cell.dt = spec.dt;
        cell.dt_over_dt_scr = spec.dt / ts.dt_scr;
        if (spec.order.is_first_order()) {
            cell.grade = first.grade();
            cell.trace = first_trace;
            cell.trace.dt = spec.dt;
            cell.hessian = project_hamiltonian(first, h, cfg.support_threshold);
        } else {
            const KrylovBasis basis = build_basis(h, spec.order, spec.dt, init.psi, cfg.deflation_tol, sign);
            cell.grade = basis.grade();
            cell.trace = amplitudes(basis, h, init.psi, grid);
            cell.hessian = project_hamiltonian(basis, h, cfg.support_threshold);
        }
        cell.hessian.dt = spec.dt;
        cell.delta_c = complexity_difference(cell.trace, first_trace);
        cell.band = bandwidth_profile(cell.hessian);
    });
    return result;
}

ExperimentResult compute_theorem(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.config = cfg;
    const GeneratorSign sign = cfg.conjugate_generator ? GeneratorSign::Forward : GeneratorSign::Backward;
    result.theorem = verify_theorem1(cfg.trials, cfg.dim, TauSweep{cfg.tau_points, cfg.tau_min_fraction}, cfg.seed,
                                     cfg.deflation_tol, sign);
    return result;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = to_string(c.experiment);
    j["dim"] = c.dim;
    j["seed"] = c.seed;
    std::vector<std::string> orders;
    for (const auto& o : c.orders) orders.push_back(o.label());
    j["orders"] = orders;
    j["dt_mode"] = to_string(c.dt_mode);
    j["dt_values"] = c.dt_values;
    j["t_start"] = c.t_start;
    j["t_stop"] = c.t_stop;
    j["t_points"] = c.t_points;
    j["time_unit"] = to_string(c.time_unit);
    j["normalize"] = c.normalize;
    j["conjugate_generator"] = c.conjugate_generator;
    j["deflation_tol"] = c.deflation_tol;
    j["support_threshold"] = c.support_threshold;
    if (c.experiment == Experiment::Theorem1) {
        j["trials"] = c.trials;
        j["tau_points"] = c.tau_points;
        j["tau_min_fraction"] = c.tau_min_fraction;
    }
    j["output_dir"] = c.output_dir.string();
    return j;
}

nlohmann::ordered_json theorem_json(const Theorem1Report& r) {
    nlohmann::ordered_json j;
    j["trials"] = r.trials;
    j["dim"] = r.dim;
    j["seed"] = r.seed;
    j["violations"] = r.violations;
    j["min_margin"] = r.min_margin;
    j["resamples"] = r.resamples;
    j["grade3_trials"] = r.grade3_trials;
    j["max_kappa0_defect"] = r.max_kappa0_defect;
    j["max_kappa2_inf"] = r.max_kappa2_inf;
    j["max_transfer_defect"] = r.max_transfer_defect;
    auto& records = j["records"] = nlohmann::ordered_json::array();
    for (const auto& rec : r.records) {
        records.push_back({{"trial", rec.trial},
                           {"seed", rec.seed},
                           {"tau", rec.tau},
                           {"c1", rec.c1},
                           {"c_inf", rec.c_inf},
                           {"margin", rec.margin}});
    }
    return j;
}

} // namespace

unsigned worker_threads() {
    if (const char* env = std::getenv("KRYLOV_LAB_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult compute_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    return cfg.experiment == Experiment::Theorem1 ? compute_theorem(cfg) : compute_figure(cfg);
}

std::string trace_file_name(const CellResult& cell) {
    return "trace_p" + cell.order.label() + "_dt" + short_num(cell.dt) + ".csv";
}

std::string hessian_file_name(const CellResult& cell) {
    return "hessian_p" + cell.order.label() + "_dt" + short_num(cell.dt) + ".csv";
}

std::string trace_csv(const CellResult& cell, double tau_h) {
    std::string out = "t,t_over_tauH,C,dC_vs_p1";
    const std::size_t m = cell.trace.levels();
    for (std::size_t n = 0; n < m; ++n) out += ",k" + std::to_string(n) + "_sq";
    out += '\n';
    const auto& grid = cell.trace.grid;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double t = grid.at(i);
        out += num(t) + ',' + num(t / tau_h) + ',' + num(cell.trace.complexity[i]) + ',' + num(cell.delta_c[i]);
        for (std::size_t n = 0; n < m; ++n) {
            out += ',' + num(cell.trace.amplitudes_sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)));
        }
        out += '\n';
    }
    return out;
}

std::string hessian_csv(const CellResult& cell) {
    const Eigen::Index m = cell.hessian.entries.rows();
    std::string out;
    for (Eigen::Index j = 0; j < m; ++j) out += (j ? ",c" : "c") + std::to_string(j);
    out += '\n';
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j) out += ',';
            out += num(std::abs(cell.hessian.entries(i, j)));
        }
        out += '\n';
    }
    return out;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result) {
    const auto& cfg = result.config;
    for (const auto& cell : result.cells) {
        const double defect = cell.trace.max_row_sum_defect();
        if (defect > kRowSumTolerance) {
            throw NumericError("trace " + trace_file_name(cell) + " violates the row-sum invariant (defect " +
                               num(defect) + ")");
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
        throw ConfigError("cannot create output directory " + cfg.output_dir.string() +
                          (ec ? ": " + ec.message() : std::string()));
    }

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        const auto path = cfg.output_dir / name;
        write_text(path, text);
        written.push_back(path);
    };

    if (result.timescales) {
        const double tau_h = result.timescales->tau_H;
        for (const auto& cell : result.cells) {
            emit(trace_file_name(cell), trace_csv(cell, tau_h));
            emit(hessian_file_name(cell), hessian_csv(cell));
        }
    }

    if (result.theorem) {
        nlohmann::ordered_json j = theorem_json(*result.theorem);
        j["config"] = config_json(cfg);
        emit("theorem1.json", j.dump(2) + "\n");
    }

    if (result.timescales) {
        const auto& ts = *result.timescales;
        nlohmann::ordered_json j;
        j["h_norm"] = ts.h_norm;
        j["grade"] = ts.grade;
        j["tau_scr"] = ts.tau_scr;
        j["dt_scr"] = ts.dt_scr;
        j["mean_spacing"] = ts.mean_spacing;
        j["tau_H"] = ts.tau_H;
        j["tau_H_over_tau_scr"] = ts.tau_H / ts.tau_scr;
        j["seed"] = cfg.seed;
        j["initial_state"] = "uniform superposition of eigenstates, ascending energy, "
                             "largest entry of each eigenvector real positive";
        j["warnings"] = result.warnings;
        auto& cells = j["cells"] = nlohmann::ordered_json::array();
        for (const auto& cell : result.cells) {
            cells.push_back({{"order", cell.order.label()},
                             {"dt", cell.dt},
                             {"dt_over_dt_scr", cell.dt_over_dt_scr},
                             {"grade", cell.grade},
                             {"max_band", cell.band.max_band},
                             {"mean_band", cell.band.mean_band},
                             {"row_sum_defect", cell.trace.max_row_sum_defect()},
                             {"trace_file", trace_file_name(cell)},
                             {"hessian_file", hessian_file_name(cell)}});
        }
        j["config"] = config_json(cfg);
        emit("timescales.json", j.dump(2) + "\n");
    }
    return written;
}

std::vector<std::filesystem::path> run(const ExperimentConfig& cfg) {
    return write_outputs(compute_experiment(cfg));
}

} // namespace krylab
