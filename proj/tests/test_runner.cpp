#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "krylab/config.hpp"
#include "krylab/errors.hpp"
#include "krylab/runner.hpp"

using namespace krylab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("krylab_runner_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::set<std::string> names(const std::vector<fs::path>& paths) {
    std::set<std::string> out;
    for (const auto& p : paths) out.insert(p.filename().string());
    return out;
}

} // namespace

TEST_CASE("fig1 defaults write four traces, four hessians and timescales.json") {
    ExperimentConfig cfg = default_config(Experiment::Fig1Small);
    cfg.output_dir = scratch("fig1");
    const auto files = names(run(cfg));
    CHECK(files == std::set<std::string>{"trace_p1_dt2.csv", "trace_p2_dt2.csv", "trace_p3_dt2.csv",
                                         "trace_pinf_dt2.csv", "hessian_p1_dt2.csv", "hessian_p2_dt2.csv",
                                         "hessian_p3_dt2.csv", "hessian_pinf_dt2.csv", "timescales.json"});

    const std::string trace = slurp(cfg.output_dir / "trace_p2_dt2.csv");
    std::istringstream lines(trace);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,t_over_tauH,C,dC_vs_p1,k0_sq,k1_sq,k2_sq");
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 601);
    CHECK(trace.find('\r') == std::string::npos);

    const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "timescales.json"));
    CHECK(j["seed"] == cfg.seed);
    CHECK(j["config"]["experiment"] == "fig1_small");
    CHECK(j["h_norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j.contains("initial_state"));
    CHECK(j["cells"].size() == 4);
}

TEST_CASE("fig2 defaults write twelve traces") {
    ExperimentConfig cfg = default_config(Experiment::Fig2Gue);
    cfg.output_dir = scratch("fig2");
    const auto files = run(cfg);
    std::size_t traces = 0;
    for (const auto& f : files) traces += f.filename().string().starts_with("trace_");
    CHECK(traces == 12);
}

TEST_CASE("theorem1 defaults write theorem1.json with no violations") {
    ExperimentConfig cfg = default_config(Experiment::Theorem1);
    cfg.trials = 20;
    cfg.output_dir = scratch("theorem1");
    CHECK(names(run(cfg)) == std::set<std::string>{"theorem1.json"});
    const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "theorem1.json"));
    CHECK(j["violations"] == 0);
    CHECK(j["records"].size() == 20 * 20);
}

TEST_CASE("identical configs produce bit-identical files") {
    for (Experiment e : {Experiment::Fig1Small, Experiment::Fig2Gue}) {
        ExperimentConfig a = default_config(e);
        if (e == Experiment::Fig2Gue) a.t_points = 200;
        ExperimentConfig b = a;
        a.output_dir = scratch("det_a");
        b.output_dir = scratch("det_b");
        const auto fa = run(a);
        const auto fb = run(b);
        REQUIRE(fa.size() == fb.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
            CHECK(fa[i].filename() == fb[i].filename());
            if (fa[i].extension() == ".csv") CHECK(slurp(fa[i]) == slurp(fb[i]));
        }
    }
}

TEST_CASE("thread count does not change results") {
    ExperimentConfig cfg = default_config(Experiment::Fig1Small);
    ::setenv("KRYLOV_LAB_THREADS", "1", 1);
    CHECK(worker_threads() == 1);
    const ExperimentResult serial = compute_experiment(cfg);
    ::setenv("KRYLOV_LAB_THREADS", "4", 1);
    CHECK(worker_threads() == 4);
    const ExperimentResult parallel = compute_experiment(cfg);
    ::unsetenv("KRYLOV_LAB_THREADS");
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(trace_csv(serial.cells[i], 1.0) == trace_csv(parallel.cells[i], 1.0));
    }
}

TEST_CASE("cells are ordered by dt then order") {
    ExperimentConfig cfg = default_config(Experiment::Fig2Gue);
    cfg.dim = 10;
    cfg.t_points = 50;
    const ExperimentResult r = compute_experiment(cfg);
    REQUIRE(r.cells.size() == 12);
    CHECK(r.cells[0].order.is_first_order());
    CHECK(r.cells[3].order.is_infinite());
    CHECK(r.cells[0].dt_over_dt_scr == doctest::Approx(0.2));
    CHECK(r.cells[4].dt_over_dt_scr == doctest::Approx(1.0));
    CHECK(r.cells[11].dt_over_dt_scr == doctest::Approx(1.5));
    CHECK(trace_file_name(r.cells[3]).starts_with("trace_pinf_dt"));
}

TEST_CASE("unwritable output directory is a config error") {
    ExperimentConfig cfg = default_config(Experiment::Fig1Small);
    const fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "file, not a directory";
    cfg.output_dir = blocker / "sub";
    CHECK_THROWS_AS(run(cfg), ConfigError);
    fs::remove(blocker);
}
