#include "krylab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "krylab/errors.hpp"

namespace krylab {

namespace {

// Shipped seeds for the two figure reproductions and the theorem sweep.
constexpr std::uint64_t kFig1Seed = 7;
constexpr std::uint64_t kFig2Seed = 2024;
constexpr std::uint64_t kTheorem1Seed = 1;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct LineError {
    std::string message;
};

double parse_double(const std::string& v) {
    if (v.empty()) throw LineError{"expected a number"};
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
        throw LineError{"'" + v + "' is not a finite number"};
    }
    return x;
}

std::uint64_t parse_uint(const std::string& v) {
    if (v.empty() || v.front() == '-' || v.front() == '+') throw LineError{"'" + v + "' is not a non-negative integer"};
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) {
        throw LineError{"'" + v + "' is not a non-negative integer"};
    }
    return x;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw LineError{"'" + v + "' is not a boolean (true/false)"};
}

Experiment parse_experiment(const std::string& v) {
    if (v == "fig1_small") return Experiment::Fig1Small;
    if (v == "fig2_gue") return Experiment::Fig2Gue;
    if (v == "theorem1") return Experiment::Theorem1;
    throw LineError{"unknown experiment '" + v + "' (fig1_small, fig2_gue, theorem1)"};
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(item));
    if (out.empty()) throw LineError{"empty list"};
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"dim", [](ExperimentConfig& c, const std::string& v) { c.dim = parse_uint(v); }},
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_uint(v); }},
        {"orders",
         [](ExperimentConfig& c, const std::string& v) {
             c.orders.clear();
             for (const auto& item : split_list(v)) {
                 try {
                     c.orders.push_back(GeneratorOrder::parse(item));
                 } catch (const StructuralError& e) {
                     throw LineError{e.what()};
                 }
             }
         }},
        {"dt",
         [](ExperimentConfig& c, const std::string& v) {
             c.dt_mode = DtMode::Absolute;
             c.dt_values = parse_double_list(v);
         }},
        {"dt_scr_multiples",
         [](ExperimentConfig& c, const std::string& v) {
             c.dt_mode = DtMode::ScramblingMultiple;
             c.dt_values = parse_double_list(v);
         }},
        {"t_start", [](ExperimentConfig& c, const std::string& v) { c.t_start = parse_double(v); }},
        {"t_stop", [](ExperimentConfig& c, const std::string& v) { c.t_stop = parse_double(v); }},
        {"t_points", [](ExperimentConfig& c, const std::string& v) { c.t_points = parse_uint(v); }},
        {"time_unit",
         [](ExperimentConfig& c, const std::string& v) {
             if (v == "absolute") {
                 c.time_unit = TimeUnit::Absolute;
             } else if (v == "heisenberg") {
                 c.time_unit = TimeUnit::Heisenberg;
             } else {
                 throw LineError{"time_unit must be 'absolute' or 'heisenberg', got '" + v + "'"};
             }
         }},
        {"normalize", [](ExperimentConfig& c, const std::string& v) { c.normalize = parse_bool(v); }},
        {"conjugate_generator",
         [](ExperimentConfig& c, const std::string& v) { c.conjugate_generator = parse_bool(v); }},
        {"deflation_tol", [](ExperimentConfig& c, const std::string& v) { c.deflation_tol = parse_double(v); }},
        {"support_threshold",
         [](ExperimentConfig& c, const std::string& v) { c.support_threshold = parse_double(v); }},
        {"trials", [](ExperimentConfig& c, const std::string& v) { c.trials = parse_uint(v); }},
        {"tau_points", [](ExperimentConfig& c, const std::string& v) { c.tau_points = parse_uint(v); }},
        {"tau_min_fraction",
         [](ExperimentConfig& c, const std::string& v) { c.tau_min_fraction = parse_double(v); }},
        {"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
    };
    return table;
}

} // namespace

std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::Fig1Small: return "fig1_small";
    case Experiment::Fig2Gue: return "fig2_gue";
    case Experiment::Theorem1: return "theorem1";
    }
    return "?";
}

std::string to_string(DtMode m) { return m == DtMode::Absolute ? "absolute" : "scrambling_multiple"; }

std::string to_string(TimeUnit u) { return u == TimeUnit::Absolute ? "absolute" : "heisenberg"; }

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.orders = {GeneratorOrder::finite(1), GeneratorOrder::finite(2), GeneratorOrder::finite(3),
                GeneratorOrder::infinite()};
    switch (e) {
    case Experiment::Fig1Small:
        c.dim = 3;
        c.seed = kFig1Seed;
        c.normalize = true;
        c.dt_mode = DtMode::Absolute;
        c.dt_values = {2.0};
        c.t_start = 0.0;
        c.t_stop = 6.0;
        c.t_points = 601;
        c.time_unit = TimeUnit::Absolute;
        c.output_dir = "out/fig1_small";
        break;
    case Experiment::Fig2Gue:
        c.dim = 50;
        c.seed = kFig2Seed;
        c.normalize = false;
        c.dt_mode = DtMode::ScramblingMultiple;
        c.dt_values = {0.2, 1.0, 1.5};
        c.t_start = 0.0;
        c.t_stop = 3.0;
        c.t_points = 900;
        c.time_unit = TimeUnit::Heisenberg;
        c.output_dir = "out/fig2_gue";
        break;
    case Experiment::Theorem1:
        c.dim = 3;
        c.seed = kTheorem1Seed;
        c.normalize = false;
        c.orders = {GeneratorOrder::finite(1), GeneratorOrder::infinite()};
        c.dt_mode = DtMode::Absolute;
        c.dt_values = {1.0};
        c.time_unit = TimeUnit::Heisenberg;
        c.t_start = 0.0;
        c.t_stop = 1.0;
        c.t_points = 2;
        c.output_dir = "out/theorem1";
        break;
    }
    return c;
}

void validate_config(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    const std::size_t min_dim = c.experiment == Experiment::Theorem1 ? 3 : 2;
    if (c.dim < min_dim) fail("dim must be >= " + std::to_string(min_dim));
    if (c.orders.empty()) fail("orders must not be empty");
    if (std::none_of(c.orders.begin(), c.orders.end(), [](const GeneratorOrder& o) { return o.is_first_order(); })) {
        fail("baseline order 1 required in orders");
    }
    for (std::size_t i = 0; i < c.orders.size(); ++i) {
        for (std::size_t j = i + 1; j < c.orders.size(); ++j) {
            if (c.orders[i] == c.orders[j]) fail("order " + c.orders[i].label() + " listed twice");
        }
    }
    if (c.dt_values.empty()) fail("need at least one dt value");
    for (double v : c.dt_values) {
        if (!(v > 0.0)) fail("dt values must be positive");
    }
    if (!(c.t_start >= 0.0) || !(c.t_stop > c.t_start) || c.t_points < 2) {
        fail("time grid needs 0 <= t_start < t_stop and t_points >= 2");
    }
    if (!(c.deflation_tol > 0.0) || !(c.deflation_tol < 1.0)) fail("deflation_tol must lie in (0, 1)");
    if (!(c.support_threshold > 0.0)) fail("support_threshold must be positive");
    if (c.trials < 1) fail("trials must be >= 1");
    if (c.tau_points < 1) fail("tau_points must be >= 1");
    if (!(c.tau_min_fraction > 0.0) || !(c.tau_min_fraction <= 1.0)) fail("tau_min_fraction must lie in (0, 1]");
    if (c.output_dir.empty()) fail("output_dir must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    struct Entry {
        std::string key;
        std::string value;
        int line;
    };
    std::vector<Entry> entries;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto error_at = [&](int line, const std::string& msg) {
        return ConfigError(source + ":" + std::to_string(line) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw error_at(line_no, "expected 'key = value'");
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) throw error_at(line_no, "missing key before '='");
        if (e.key != "experiment" && !setters().contains(e.key)) {
            throw error_at(line_no, "unknown key '" + e.key + "'");
        }
        if (!seen.insert(e.key).second) throw error_at(line_no, "key '" + e.key + "' given twice");
        entries.push_back(std::move(e));
    }
    if (seen.contains("dt") && seen.contains("dt_scr_multiples")) {
        throw ConfigError(source + ": 'dt' and 'dt_scr_multiples' are mutually exclusive");
    }

    Experiment experiment = Experiment::Fig1Small;
    bool have_experiment = false;
    for (const auto& e : entries) {
        if (e.key != "experiment") continue;
        try {
            experiment = parse_experiment(e.value);
        } catch (const LineError& err) {
            throw error_at(e.line, err.message);
        }
        have_experiment = true;
    }
    if (!have_experiment) throw ConfigError(source + ": missing required key 'experiment'");

    ExperimentConfig cfg = default_config(experiment);
    for (const auto& e : entries) {
        if (e.key == "experiment") continue;
        try {
            setters().at(e.key)(cfg, e.value);
        } catch (const LineError& err) {
            throw error_at(e.line, "key '" + e.key + "': " + err.message);
        }
    }
    try {
        validate_config(cfg);
    } catch (const ConfigError& err) {
        throw ConfigError(source + ": " + err.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string effective_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    auto join_doubles = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
        return s;
    };
    std::string orders;
    for (std::size_t i = 0; i < c.orders.size(); ++i) orders += (i ? ", " : "") + c.orders[i].label();

    out << "experiment = " << to_string(c.experiment) << '\n'
        << "dim = " << c.dim << '\n'
        << "seed = " << c.seed << '\n'
        << "orders = " << orders << '\n'
        << (c.dt_mode == DtMode::Absolute ? "dt = " : "dt_scr_multiples = ") << join_doubles(c.dt_values) << '\n'
        << "t_start = " << format_double(c.t_start) << '\n'
        << "t_stop = " << format_double(c.t_stop) << '\n'
        << "t_points = " << c.t_points << '\n'
        << "time_unit = " << to_string(c.time_unit) << '\n'
        << "normalize = " << (c.normalize ? "true" : "false") << '\n'
        << "conjugate_generator = " << (c.conjugate_generator ? "true" : "false") << '\n'
        << "deflation_tol = " << format_double(c.deflation_tol) << '\n'
        << "support_threshold = " << format_double(c.support_threshold) << '\n'
        << "trials = " << c.trials << '\n'
        << "tau_points = " << c.tau_points << '\n'
        << "tau_min_fraction = " << format_double(c.tau_min_fraction) << '\n'
        << "output_dir = " << c.output_dir.string() << '\n';
    return out.str();
}

} // namespace krylab
