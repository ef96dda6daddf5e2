#include "gts/cli/commands.hpp"

#include "gts/cli/ingest.hpp"
#include "gts/cli/options.hpp"
#include "gts/evaluate.hpp"
#include "gts/forecast.hpp"
#include "gts/intervals.hpp"
#include "gts/stats.hpp"
#include "gts/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

namespace gts::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v, const char* spec = "%.10g") {
    if (!std::isfinite(v)) {
        return "NA";
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class OutputDir {
public:
    OutputDir(const RunConfig& config, std::string command)
        : dir_(config.out_dir), command_(std::move(command)), hash_(config_hash(config)), seed_(config.seed) {
        std::filesystem::create_directories(dir_);
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
        out << "# gts " << command_ << " config_hash=" << hex(hash_) << " seed=" << seed_ << '\n';
        return out;
    }

    void write_json(const std::string& name, const ordered_json& j) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
        out << j.dump(2) << '\n';
    }

    [[nodiscard]] std::uint64_t hash() const { return hash_; }

private:
    std::filesystem::path dir_;
    std::string command_;
    std::uint64_t hash_;
    std::uint64_t seed_;
};

std::size_t year_index(const Panel& panel, int year) {
    const auto& years = panel.years();
    const auto it = std::find(years.begin(), years.end(), year);
    if (it == years.end()) {
        throw std::invalid_argument("year " + std::to_string(year) + " is outside the panel (" +
                                    std::to_string(years.front()) + "-" + std::to_string(years.back()) + ")");
    }
    return static_cast<std::size_t>(it - years.begin());
}

Eigen::MatrixXd bottom_exposure_matrix(const Panel& panel, std::size_t first, std::size_t count) {
    const auto mk = panel.hierarchy().bottom_count();
    Eigen::MatrixXd e(static_cast<Eigen::Index>(mk), static_cast<Eigen::Index>(count));
    for (std::size_t h = 0; h < count; ++h) {
        const auto v = panel.bottom_exposures_at(first + h);
        for (std::size_t k = 0; k < mk; ++k) {
            e(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(h)) = v[k];
        }
    }
    return e;
}

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["panel"] = c.panel;
    j["hierarchy"] = c.hierarchy;
    j["methods"] = c.methods;
    j["horizon"] = c.horizon;
    j["train_end"] = c.train_end;
    j["alpha"] = c.alpha;
    j["intervals"] = c.intervals;
    j["replicates"] = c.replicates;
    j["paths"] = c.paths;
    j["s_mode"] = c.s_mode;
    j["seed"] = c.seed;
    j["max_p"] = c.max_p;
    j["max_d"] = c.max_d;
    j["max_q"] = c.max_q;
    j["min_length"] = c.min_length;
    j["log_rates"] = c.log_rates;
    return j;
}

ordered_json number_or_null(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

Ingested ingest(const RunConfig& config) {
    validate(config);
    validate_paths(config);
    const auto hierarchy = read_hierarchy(config.hierarchy);
    return read_panel(config.panel, hierarchy);
}

}  // namespace

void cmd_validate(const std::string& panel, const std::string& hierarchy, std::ostream& out) {
    const auto h = read_hierarchy(hierarchy);
    const auto in = read_panel(panel, h);
    const auto& r = in.report;
    out << "rows: " << r.rows << " (" << r.aggregate_rows << " aggregate)\n"
        << "years: " << r.first_year << "-" << r.last_year << " (" << in.panel.length() << ")\n"
        << "nodes: " << r.nodes << " (" << r.bottom_nodes << " bottom)\n";
    for (std::size_t l = 0; l < h.level_count(); ++l) {
        out << "level " << l << " " << h.level_name(l) << ": " << h.nodes_at_level(l).size() << " series\n";
    }
}

void cmd_forecast(const RunConfig& config, std::ostream& warnings) {
    const auto in = ingest(config);
    const auto& panel = in.panel;
    const auto& hierarchy = panel.hierarchy();
    const std::size_t n = config.train_end == 0 ? panel.length() : year_index(panel, config.train_end) + 1;
    const auto H = static_cast<std::size_t>(config.horizon);
    const auto mode = s_mode(config);
    const auto method_list = methods(config);
    if (mode == SMode::holdout && n + H > panel.length()) {
        throw std::invalid_argument("holdout s-mode needs observed exposures for every forecast year");
    }
    const Panel train = panel.head(n);
    const bool reconciles = std::any_of(method_list.begin(), method_list.end(), [](Method m) { return m != Method::base; });
    const auto threads = thread_count(config);
    const auto base = base_forecasts(train, H, modeling(config), reconciles && mode == SMode::forecast, threads);
    const Eigen::MatrixXd holdout = mode == SMode::holdout ? bottom_exposure_matrix(panel, n, H) : Eigen::MatrixXd();

    std::vector<std::string> notes;
    for (std::size_t j = 0; j < hierarchy.size(); ++j) {
        if (!base.failures[j].empty()) {
            notes.push_back("series " + hierarchy.label(j) + ": " + base.failures[j]);
        }
    }

    const OutputDir out(config, "forecast");
    const int last_train_year = panel.years()[n - 1];
    std::vector<ForecastSet> sets;
    for (Method m : method_list) {
        sets.push_back(reconcile_forecasts(hierarchy, base, m, mode,
                                           mode == SMode::forecast ? base.bottom_exposures : holdout));
        auto f = out.open("forecast_" + std::string(to_string(m)) + ".csv");
        f << "node,level,year,value\n";
        const auto& s = sets.back();
        for (std::size_t j = 0; j < hierarchy.size(); ++j) {
            for (std::size_t h = 0; h < H; ++h) {
                f << hierarchy.label(j) << ',' << hierarchy.level_name(hierarchy.level(j)) << ','
                  << last_train_year + static_cast<int>(h) + 1 << ','
                  << fmt(s.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(h))) << '\n';
            }
        }
    }

    std::optional<boot::IntervalResult> intervals;
    if (config.intervals) {
        std::vector<Method> interval_methods;
        for (Method m : method_list) {
            if (m == Method::gls) {
                notes.push_back("prediction intervals are not produced for the gls method");
            } else {
                interval_methods.push_back(m);
            }
        }
        if (!interval_methods.empty()) {
            intervals = boot::interval_forecasts(train, H, interval_methods, modeling(config),
                                                 interval_options(config), holdout);
            notes.insert(notes.end(), intervals->warnings.begin(), intervals->warnings.end());
            for (const auto& iv : intervals->methods) {
                auto f = out.open("intervals_" + std::string(to_string(iv.method)) + ".csv");
                f << "node,level,year,lower,upper,alpha\n";
                for (std::size_t j = 0; j < hierarchy.size(); ++j) {
                    for (std::size_t h = 0; h < H; ++h) {
                        const auto r = static_cast<Eigen::Index>(j);
                        const auto c = static_cast<Eigen::Index>(h);
                        f << hierarchy.label(j) << ',' << hierarchy.level_name(hierarchy.level(j)) << ','
                          << last_train_year + static_cast<int>(h) + 1 << ',' << fmt(iv.lower(r, c)) << ','
                          << fmt(iv.upper(r, c)) << ',' << fmt(config.alpha) << '\n';
                    }
                }
            }
        }
    }

    {
        auto f = out.open("plot_data.csv");
        f << "node,level,year,kind,method,value,lower,upper\n";
        for (std::size_t j = 0; j < hierarchy.size(); ++j) {
            const auto label = hierarchy.label(j);
            const auto& level = hierarchy.level_name(hierarchy.level(j));
            for (std::size_t t = 0; t < panel.length(); ++t) {
                f << label << ',' << level << ',' << panel.years()[t] << ",observed,," << fmt(panel.node(j).rate[t])
                  << ",NA,NA\n";
            }
            for (std::size_t k = 0; k < method_list.size(); ++k) {
                const Method m = method_list[k];
                const boot::IntervalForecasts* iv = nullptr;
                if (intervals) {
                    for (const auto& x : intervals->methods) {
                        iv = x.method == m ? &x : iv;
                    }
                }
                for (std::size_t h = 0; h < H; ++h) {
                    const auto r = static_cast<Eigen::Index>(j);
                    const auto c = static_cast<Eigen::Index>(h);
                    f << label << ',' << level << ',' << last_train_year + static_cast<int>(h) + 1 << ",forecast,"
                      << to_string(m) << ',' << fmt(sets[k].values(r, c)) << ','
                      << (iv ? fmt(iv->lower(r, c)) : "NA") << ',' << (iv ? fmt(iv->upper(r, c)) : "NA") << '\n';
                }
            }
        }
    }

    ordered_json summary;
    summary["command"] = "forecast";
    summary["config_hash"] = hex(out.hash());
    summary["seed"] = config.seed;
    summary["config"] = config_json(config);
    summary["train_years"] = {panel.years().front(), last_train_year};
    summary["horizon"] = H;
    ordered_json orders = ordered_json::object();
    for (std::size_t j = 0; j < hierarchy.size(); ++j) {
        orders[hierarchy.label(j)] = base.failures[j].empty() ? arima::to_string(base.orders[j]) : "failed";
    }
    summary["rate_models"] = orders;
    summary["warnings"] = notes;
    out.write_json("summary.json", summary);
    for (const auto& w : notes) {
        warnings << "warning: " << w << '\n';
    }
}

void cmd_evaluate(const RunConfig& config, std::ostream& warnings) {
    const auto in = ingest(config);
    const auto& panel = in.panel;
    const int train_end = config.train_end == 0 ? panel.years().back() - config.horizon : config.train_end;
    const std::size_t n0 = year_index(panel, train_end) + 1;
    const std::size_t n_end = std::min(panel.length(), n0 + static_cast<std::size_t>(config.horizon));
    const eval::RollingPlan plan(n0, n_end);

    eval::RollingOptions options;
    options.methods = methods(config);
    options.s_mode = s_mode(config);
    options.modeling = modeling(config);
    options.intervals = config.intervals;
    options.interval_options = interval_options(config);
    options.threads = thread_count(config);
    const auto result = eval::run_rolling(panel, plan, options);

    const OutputDir out(config, "evaluate");
    const std::size_t H = plan.horizon();
    auto tables_of = [](const eval::MethodScores& ms) {
        std::vector<const eval::ScoreTable*> t{&ms.mfe, &ms.mafe, &ms.rmsfe};
        if (ms.interval_score) {
            t.push_back(&*ms.interval_score);
        }
        return t;
    };

    for (const auto& ms : result.methods) {
        auto f = out.open("scores_" + std::string(to_string(ms.method)) + ".csv");
        f << "metric,level,horizon,forecasts,value_x100,value\n";
        for (const auto* t : tables_of(ms)) {
            for (std::size_t l = 0; l < t->levels.size(); ++l) {
                const auto c = static_cast<Eigen::Index>(l);
                for (std::size_t h = 0; h < H; ++h) {
                    const double v = t->values(static_cast<Eigen::Index>(h), c);
                    f << t->metric << ',' << t->levels[l] << ',' << h + 1 << ',' << plan.forecast_count(h + 1) << ','
                      << fmt(100.0 * v, "%.4f") << ',' << fmt(v) << '\n';
                }
                f << t->metric << ',' << t->levels[l] << ",mean,," << fmt(100.0 * t->mean(c), "%.4f") << ','
                  << fmt(t->mean(c)) << '\n';
                f << t->metric << ',' << t->levels[l] << ",median,," << fmt(100.0 * t->median(c), "%.4f") << ','
                  << fmt(t->median(c)) << '\n';
            }
        }
    }

    for (const char* metric : {"MFE", "MAFE", "RMSFE", "IntervalScore"}) {
        std::vector<std::pair<Method, const eval::ScoreTable*>> columns;
        for (const auto& ms : result.methods) {
            for (const auto* t : tables_of(ms)) {
                if (t->metric == metric) {
                    columns.emplace_back(ms.method, t);
                }
            }
        }
        if (columns.empty()) {
            continue;
        }
        auto f = out.open(std::string("table_") + metric + ".csv");
        f << "h";
        for (const auto& [m, t] : columns) {
            for (const auto& level : t->levels) {
                f << ',' << to_string(m) << ':' << level;
            }
        }
        f << '\n';
        auto row = [&](const std::string& name, auto&& value) {
            f << name;
            for (const auto& [m, t] : columns) {
                for (std::size_t l = 0; l < t->levels.size(); ++l) {
                    f << ',' << fmt(100.0 * value(*t, static_cast<Eigen::Index>(l)), "%.3f");
                }
            }
            f << '\n';
        };
        for (std::size_t h = 0; h < H; ++h) {
            row(std::to_string(h + 1),
                [&](const eval::ScoreTable& t, Eigen::Index l) { return t.values(static_cast<Eigen::Index>(h), l); });
        }
        row("Mean", [](const eval::ScoreTable& t, Eigen::Index l) { return t.mean(l); });
        row("Median", [](const eval::ScoreTable& t, Eigen::Index l) { return t.median(l); });
    }

    ordered_json summary;
    summary["command"] = "evaluate";
    summary["config_hash"] = hex(out.hash());
    summary["seed"] = config.seed;
    summary["config"] = config_json(config);
    summary["plan"] = {{"first_origin_year", panel.years()[n0 - 1]},
                       {"end_year", panel.years()[n_end - 1]},
                       {"origins", plan.origin_count()},
                       {"horizon", H}};
    summary["base_forecast_hash"] = hex(result.base_hash);
    ordered_json scores = ordered_json::object();
    for (const auto& ms : result.methods) {
        ordered_json jm = ordered_json::object();
        for (const auto* t : tables_of(ms)) {
            ordered_json jt = ordered_json::object();
            for (std::size_t l = 0; l < t->levels.size(); ++l) {
                const auto c = static_cast<Eigen::Index>(l);
                jt[t->levels[l]] = {{"mean", number_or_null(t->mean(c))}, {"median", number_or_null(t->median(c))}};
            }
            jm[t->metric] = jt;
        }
        scores[std::string(to_string(ms.method))] = jm;
    }
    summary["scores"] = scores;
    summary["warnings"] = result.warnings;
    out.write_json("summary.json", summary);
    for (const auto& w : result.warnings) {
        warnings << "warning: " << w << '\n';
    }
}

void cmd_synth(const std::filesystem::path& out_dir, std::uint64_t seed) {
    synth::SyntheticOptions options;
    options.seed = seed;
    const auto panel = synth::australian_shaped(options);
    std::filesystem::create_directories(out_dir);
    std::ofstream p(out_dir / "panel.csv", std::ios::binary | std::ios::trunc);
    std::ofstream h(out_dir / "hierarchy.cfg", std::ios::binary | std::ios::trunc);
    if (!p || !h) {
        throw std::runtime_error("cannot write into " + out_dir.string());
    }
    write_panel(p, panel);
    h << format_hierarchy(panel.hierarchy());
}

namespace {

std::optional<std::string> config_argument(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            return std::string(argv[i + 1]);
        }
        if (arg.rfind("--config=", 0) == 0) {
            return arg.substr(9);
        }
    }
    return std::nullopt;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Grouped time-series forecast reconciliation for demographic rates"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");

    std::string v_panel;
    std::string v_hierarchy;
    auto* validate_cmd = app.add_subcommand("validate", "Ingest and validate a panel");
    validate_cmd->add_option("--panel", v_panel, "Panel CSV")->required();
    validate_cmd->add_option("--hierarchy", v_hierarchy, "Hierarchy declaration")->required();

    // Config-file values become the defaults that command-line options override.
    RunConfig file_config;
    try {
        if (const auto path = config_argument(argc, argv)) {
            file_config = load_config(*path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::string config_path;

    RunConfig forecast_config = file_config;
    auto* forecast_cmd = app.add_subcommand("forecast", "Base and reconciled forecasts");
    forecast_cmd->add_option("--config", config_path, "Configuration file (key = value)");
    add_run_options(*forecast_cmd, forecast_config);

    RunConfig evaluate_config = file_config;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Rolling-origin evaluation");
    evaluate_cmd->add_option("--config", config_path, "Configuration file (key = value)");
    add_run_options(*evaluate_cmd, evaluate_config);

    std::string synth_dir = "synthetic";
    std::uint64_t synth_seed = 1;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic Australian-shaped panel");
    synth_cmd->add_option("--out-dir", synth_dir, "Output directory");
    synth_cmd->add_option("--seed", synth_seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*validate_cmd) {
            cmd_validate(v_panel, v_hierarchy, std::cout);
        } else if (*forecast_cmd) {
            cmd_forecast(forecast_config, std::cerr);
        } else if (*evaluate_cmd) {
            cmd_evaluate(evaluate_config, std::cerr);
        } else if (*synth_cmd) {
            cmd_synth(synth_dir, synth_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace gts::cli
