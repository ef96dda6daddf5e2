#include "gts/cli/config.hpp"

#include "gts/cli/options.hpp"
#include "gts/stats.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gts::cli {

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void add_run_options(CLI::App& app, RunConfig& c) {
    app.add_option("--panel", c.panel, "Panel CSV: year,<attributes>,deaths,exposure");
    app.add_option("--hierarchy", c.hierarchy, "Hierarchy declaration file");
    app.add_option("--methods", c.methods, "Methods: base, bottom-up, ols, gls")->delimiter(',');
    app.add_option("--horizon,--h", c.horizon, "Forecast horizon");
    app.add_option("--train-end", c.train_end, "Last training year");
    app.add_option("--alpha", c.alpha, "Interval level is 1 - alpha");
    app.add_flag("--intervals,!--no-intervals", c.intervals, "Bootstrap prediction intervals");
    app.add_option("--replicates", c.replicates, "Maximum-entropy bootstrap replicates (B)");
    app.add_option("--paths", c.paths, "Simulated paths per replicate (P)");
    app.add_option("--s-mode", c.s_mode, "Summing-matrix exposures: forecast or holdout");
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--max-p", c.max_p, "Largest AR order searched");
    app.add_option("--max-d", c.max_d, "Largest differencing order");
    app.add_option("--max-q", c.max_q, "Largest MA order searched");
    app.add_option("--min-length", c.min_length, "Minimum series length after differencing");
    app.add_flag("--log-rates,!--raw-rates", c.log_rates, "Model rates on the log scale");
    app.add_option("--out-dir", c.out_dir, "Output directory");
    app.add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

std::string serialize(const RunConfig& c) {
    std::ostringstream out;
    out << "panel = " << quoted(c.panel) << '\n';
    out << "hierarchy = " << quoted(c.hierarchy) << '\n';
    out << "methods = [";
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
        out << (i ? ", " : "") << quoted(c.methods[i]);
    }
    out << "]\n";
    out << "horizon = " << c.horizon << '\n';
    out << "train-end = " << c.train_end << '\n';
    out << "alpha = " << number(c.alpha) << '\n';
    out << "intervals = " << (c.intervals ? "true" : "false") << '\n';
    out << "replicates = " << c.replicates << '\n';
    out << "paths = " << c.paths << '\n';
    out << "s-mode = " << quoted(c.s_mode) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "max-p = " << c.max_p << '\n';
    out << "max-d = " << c.max_d << '\n';
    out << "max-q = " << c.max_q << '\n';
    out << "min-length = " << c.min_length << '\n';
    out << "log-rates = " << (c.log_rates ? "true" : "false") << '\n';
    out << "out-dir = " << quoted(c.out_dir) << '\n';
    out << "threads = " << c.threads << '\n';
    return out.str();
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    CLI::App app;
    app.set_help_flag();
    add_run_options(app, c);
    app.allow_config_extras(CLI::config_extras_mode::error);
    std::istringstream in(text);
    try {
        app.parse_from_stream(in);
    } catch (const CLI::Error& e) {
        throw std::runtime_error(std::string("invalid configuration: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::uint64_t config_hash(const RunConfig& config) {
    RunConfig c = config;
    c.panel.clear();
    c.hierarchy.clear();
    c.out_dir.clear();
    c.threads = -1;
    return stats::fnv1a(serialize(c));
}

void validate(const RunConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw std::invalid_argument(what);
        }
    };
    require(!c.methods.empty(), "methods: at least one method is required");
    for (const auto& m : c.methods) {
        require(parse_method(m).has_value(), "methods: unknown method '" + m + "'");
    }
    require(c.horizon >= 1, "horizon must be at least 1");
    require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
    require(c.replicates >= 2, "replicates must be at least 2");
    require(c.paths >= 2, "paths must be at least 2");
    require(parse_s_mode(c.s_mode).has_value(), "s-mode must be 'forecast' or 'holdout'");
    require(c.max_p >= 0 && c.max_p <= 10, "max-p must lie in [0, 10]");
    require(c.max_d >= 0 && c.max_d <= 2, "max-d must lie in [0, 2]");
    require(c.max_q >= 0 && c.max_q <= 10, "max-q must lie in [0, 10]");
    require(c.min_length >= 10, "min-length must be at least 10");
    require(!c.out_dir.empty(), "out-dir must not be empty");
}

void validate_paths(const RunConfig& c) {
    if (c.panel.empty() || !std::filesystem::is_regular_file(c.panel)) {
        throw std::invalid_argument("panel file '" + c.panel + "' does not exist");
    }
    if (c.hierarchy.empty() || !std::filesystem::is_regular_file(c.hierarchy)) {
        throw std::invalid_argument("hierarchy file '" + c.hierarchy + "' does not exist");
    }
}

std::vector<Method> methods(const RunConfig& c) {
    std::vector<Method> out;
    for (const auto& m : c.methods) {
        const auto parsed = parse_method(m);
        if (!parsed) {
            throw std::invalid_argument("unknown method '" + m + "'");
        }
        out.push_back(*parsed);
    }
    return out;
}

SMode s_mode(const RunConfig& c) {
    const auto mode = parse_s_mode(c.s_mode);
    if (!mode) {
        throw std::invalid_argument("s-mode must be 'forecast' or 'holdout'");
    }
    return *mode;
}

ModelingOptions modeling(const RunConfig& c) {
    ModelingOptions m;
    m.rate_bounds.max_p = c.max_p;
    m.rate_bounds.max_d = c.max_d;
    m.rate_bounds.max_q = c.max_q;
    m.rate_bounds.min_length = c.min_length;
    m.exposure_bounds = arima::exposure_bounds(m.rate_bounds);
    m.log_rates = c.log_rates;
    return m;
}

boot::IntervalOptions interval_options(const RunConfig& c) {
    boot::IntervalOptions o;
    o.alpha = c.alpha;
    o.replicates = c.replicates;
    o.paths = c.paths;
    o.seed = c.seed;
    o.s_mode = s_mode(c);
    o.threads = thread_count(c);
    return o;
}

std::size_t thread_count(const RunConfig& c) {
    long requested = c.threads;
    if (requested < 0) {
        requested = 0;
        if (const char* env = std::getenv("GTS_THREADS"); env != nullptr && *env != '\0') {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != nullptr && *end == '\0' && v >= 0) {
                requested = v;
            }
        }
    }
    return stats::resolve_threads(static_cast<std::size_t>(requested));
}

}  // namespace gts::cli
