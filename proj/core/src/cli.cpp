#include "loadcast/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "loadcast/checkpoint.hpp"
#include "loadcast/config.hpp"
#include "loadcast/gradcheck.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/stats.hpp"
#include "loadcast/synth.hpp"

namespace loadcast {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string data_path;
    std::string output_dir;
};

RunConfig resolve_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty()
                        ? parse_config_text("", "<defaults>", o.overrides)
                        : parse_config_file(o.config_path, o.overrides);
    if (!o.data_path.empty()) cfg.data_path = o.data_path;
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--set", o.overrides, "override a config key, e.g. --set train.seed=7")
        ->take_all();
    cmd->add_option("--data", o.data_path, "hourly load CSV (overrides data.path)");
    cmd->add_option("--out", o.output_dir, "output directory (overrides output.dir)");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<HourlyLoadSeries> load_data(const RunConfig& cfg) {
    if (cfg.data_path.empty()) {
        throw ConfigError("data.path is required (use --data or the config file)");
    }
    return load_csv(cfg.data_path);
}

// ---------------------------------------------------------------- stats --

int run_stats(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    const auto data = load_data(cfg);
    fs::create_directories(cfg.output_dir);
    auto out = open_out(fs::path(cfg.output_dir) / "stats.csv");
    out << "country,mean_demand,daily_dispersion,h24,h168,h8760\n";
    out.precision(10);
    for (const auto& s : data) {
        const SummaryStats sm = summary_stats(s);
        out << s.id << ',' << sm.mean_demand << ',' << sm.mean_daily_std;

        // Analysis span: the training range when configured, else the whole
        // series, truncated to whole years so the yearly bin lines up.
        HourIndex begin = s.start, end = s.end();
        if (cfg.train_start) begin = std::max(begin, day_index(*cfg.train_start) * 24);
        if (cfg.train_end) end = std::min(end, (day_index(*cfg.train_end) + 1) * 24);
        const std::int64_t years = (end - begin) / 8760;
        const HourIndex span_end = begin + years * 8760;
        for (std::size_t period : {24u, 168u, 8760u}) {
            out << ',';
            if (years < 1 ||
                !s.complete(begin, static_cast<std::size_t>(span_end - begin))) {
                continue; // not computable: leave the cell empty
            }
            out << h_ratio(s, period, begin, span_end);
        }
        out << '\n';
    }
    std::cout << "wrote " << (fs::path(cfg.output_dir) / "stats.csv").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- train --

int run_train(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    std::vector<HourlyLoadSeries> data = load_data(cfg);
    const DayRange range = cfg.train_range();
    if (cfg.short_train_span) {
        // Ab4: learn as if the data began at the (shortened) range start.
        std::vector<HourlyLoadSeries> trimmed;
        for (const auto& s : data) {
            const HourIndex from = range.first * 24;
            if (s.end() > from) trimmed.push_back(slice_series(s, from, s.end()));
        }
        data = std::move(trimmed);
    }

    // Context series: complete over the training span.
    std::vector<std::string> ctx_ids;
    if (!cfg.no_context) {
        ctx_ids = context_set(data, range.first * 24, (range.last + 1) * 24);
    }
    // Main series: anything with enough observed history to ever step.
    std::vector<std::string> main_ids;
    for (const auto& s : data) {
        if (BatchRunner::earliest_step_day(s) + cfg.warmup_steps <= range.last) {
            main_ids.push_back(s.id);
        }
    }
    if (main_ids.empty()) throw DataError("train: no trainable series in range");

    fs::create_directories(cfg.output_dir);
    {
        auto out = open_out(fs::path(cfg.output_dir) / "effective_config.txt");
        out << serialize_config(cfg);
    }

    const int members = std::max(1, cfg.ensemble_size);
    std::vector<std::string> errors(static_cast<std::size_t>(members));
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(members));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int m = next.fetch_add(1);
            if (m >= members) return;
            try {
                TrainConfig tc = cfg.train_config();
                tc.seed = cfg.seed + static_cast<std::uint64_t>(m);
                Model model =
                    Model::create(cfg.model_config(), ctx_ids, tc.seed);
                auto log = open_out(fs::path(cfg.output_dir) /
                                    ("train_" + std::to_string(m) + ".log"));
                train(model, data, main_ids, range, tc, &log);
                save_checkpoint(model, (fs::path(cfg.output_dir) /
                                        ("member_" + std::to_string(m) + ".ckpt"))
                                           .string());
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(m)] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (!e.empty()) throw DataError("train: member failed: " + e);
    }
    std::cout << "trained " << members << " member(s) on " << main_ids.size()
              << " series into " << cfg.output_dir << '\n';
    return kExitOk;
}

// ------------------------------------------------------------- forecast --

std::vector<Model> load_members(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("at least one --checkpoint is required");
    std::vector<Model> members;
    members.reserve(paths.size());
    for (const auto& p : paths) members.push_back(load_checkpoint(p));
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i].context_ids != members[0].context_ids) {
            throw DataError("checkpoints disagree on the context set");
        }
    }
    return members;
}

int run_forecast(const CommonOpts& common, const std::vector<std::string>& checkpoints,
                 const std::string& series_id, const std::string& date_str) {
    RunConfig cfg = resolve_config(common);
    const auto data = load_data(cfg);
    auto members = load_members(checkpoints);
    const auto date = parse_date(date_str);
    if (!date) throw ConfigError("bad --date '" + date_str + "' (YYYY-MM-DD)");

    std::vector<std::string> ids;
    if (series_id.empty()) {
        for (const auto& s : data) ids.push_back(s.id);
    } else {
        ids.push_back(series_id);
    }
    auto bundles = forecast_day(members, data, ids, day_index(*date), cfg.spin_up_days);
    if (bundles.empty()) {
        throw DataError("no series could be forecast on " + date_str);
    }

    fs::create_directories(cfg.output_dir);
    auto out = open_out(fs::path(cfg.output_dir) / "forecast.csv");
    out << "series,date,hour,point,lower,upper\n";
    out.precision(10);
    for (const auto& b : bundles) {
        for (int h = 0; h < 24; ++h) {
            out << b.series_id << ',' << format_date(b.day) << ',' << h << ','
                << b.point[static_cast<std::size_t>(h)] << ','
                << b.lower[static_cast<std::size_t>(h)] << ','
                << b.upper[static_cast<std::size_t>(h)] << '\n';
        }
    }
    std::cout << "wrote " << (fs::path(cfg.output_dir) / "forecast.csv").string() << '\n';
    return kExitOk;
}

// ------------------------------------------------------------- evaluate --

int run_evaluate(const CommonOpts& common, const std::vector<std::string>& checkpoints) {
    RunConfig cfg = resolve_config(common);
    const auto data = load_data(cfg);
    auto members = load_members(checkpoints);
    const DayRange range = cfg.test_range();

    std::vector<std::string> ids;
    for (const auto& s : data) ids.push_back(s.id);

    RollingOptions opts;
    opts.first = range.first;
    opts.last = range.last;
    opts.spin_up_days = cfg.spin_up_days;
    const MetricsReport model_report = rolling_evaluation(members, data, ids, opts);
    const MetricsReport naive_report = naive_evaluation(data, ids, range.first, range.last);

    fs::create_directories(cfg.output_dir);
    {
        auto out = open_out(fs::path(cfg.output_dir) / "metrics_model.csv");
        out.precision(10);
        write_report_csv(model_report, out);
    }
    {
        auto out = open_out(fs::path(cfg.output_dir) / "metrics_naive.csv");
        out.precision(10);
        write_report_csv(naive_report, out);
    }
    {
        auto out = open_out(fs::path(cfg.output_dir) / "metrics.json");
        out << "{\n\"model\":\n";
        write_report_json(model_report, out);
        out << ",\n\"naive\":\n";
        write_report_json(naive_report, out);
        out << "}\n";
    }
    std::cout << "model pooled MAPE " << model_report.pooled_hours.mape << " vs naive "
              << naive_report.pooled_hours.mape << " over " << model_report.scored_days
              << " series-days (" << model_report.skipped_days << " skipped)\n";
    return kExitOk;
}

// ---------------------------------------------------------------- synth --

int run_synth(const std::string& out_path, int series, int days, double noise,
              double shock, std::uint64_t seed) {
    SynthOptions so;
    so.num_series = series;
    so.days = days;
    so.noise = noise;
    so.shared_shock_sigma = shock;
    so.seed = seed;
    serialize_csv(synth_dataset(so), out_path);
    std::cout << "wrote " << series << " synthetic series (" << days << " days) to "
              << out_path << '\n';
    return kExitOk;
}

// ------------------------------------------------------------ gradcheck --

int run_gradcheck(double tolerance, double eps, std::size_t max_components, bool corrupt) {
    // Tiny end-to-end configuration on synthetic data: ES, both tracks,
    // modulation and the quantile loss, checked against central differences.
    SynthOptions so;
    so.num_series = 4;
    so.days = 120;
    so.noise = 0.02;
    so.seed = 7;
    const auto data = synth_dataset(so);
    const auto ids = synth_ids(so.num_series);

    ModelConfig mc;
    mc.state_size = 6;
    mc.control_size = 3;
    mc.embed_dim = 2;
    mc.context_size = 2;
    Model model = Model::create(mc, {ids[2], ids[3]}, 11);

    TrainConfig tc;
    tc.max_window_steps = 5;
    tc.warmup_steps = 1;

    std::vector<const HourlyLoadSeries*> mains = {&data[0], &data[1]};
    std::vector<const HourlyLoadSeries*> ctxs = {&data[2], &data[3]};
    const DayIndex start = BatchRunner::earliest_context_day(ctxs) + 3;
    const DayIndex last = start + tc.max_window_steps - 1;

    // The checked function is the window loss with the window-start state
    // held fixed, matching the truncation backward applies.
    const std::vector<EsState> frozen =
        BatchRunner::initial_states(model, mains, ctxs, start);

    GradCheckOptions opts;
    opts.eps = eps;
    opts.max_components_per_tensor = max_components;
    opts.seed = 11;
    opts.corrupt = corrupt;
    const GradCheckReport report = gradient_check(
        [&]() {
            WindowLoss wl = build_window_loss(model, mains, ctxs, start, last, tc, &frozen);
            if (wl.scored == 0) {
                throw DataError("gradcheck: window produced no scored step");
            }
            return LossEval{wl.graph, wl.loss};
        },
        model.params, opts);

    const bool pass = report.max_rel_err <= tolerance;
    std::cout << (pass ? "PASS" : "FAIL") << " max_rel_err=" << report.max_rel_err
              << " tolerance=" << tolerance << " components=" << report.components_checked
              << " worst=" << report.worst_param << '[' << report.worst_index << ']'
              << " analytic=" << report.analytic_at_worst
              << " numeric=" << report.numeric_at_worst << '\n';
    return pass ? kExitOk : kExitNumeric;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    for (auto& s : storage) argv.push_back(s.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

int cli_main(int argc, char** argv) {
    CLI::App app{"hybrid exponential-smoothing / recurrent-network load forecaster"};
    app.require_subcommand(1);

    CommonOpts stats_o, train_o, fc_o, ev_o;
    auto* stats_cmd = app.add_subcommand("stats", "per-country series statistics");
    add_common(stats_cmd, stats_o);

    auto* train_cmd = app.add_subcommand("train", "train an ensemble");
    add_common(train_cmd, train_o);

    auto* fc_cmd = app.add_subcommand("forecast", "forecast one day");
    add_common(fc_cmd, fc_o);
    std::vector<std::string> fc_ckpts;
    std::string fc_series, fc_date;
    fc_cmd->add_option("--checkpoint", fc_ckpts, "checkpoint file(s)")->required();
    fc_cmd->add_option("--series", fc_series, "series id (default: all)");
    fc_cmd->add_option("--date", fc_date, "forecast day, YYYY-MM-DD")->required();

    auto* ev_cmd = app.add_subcommand("evaluate", "rolling test-range evaluation");
    add_common(ev_cmd, ev_o);
    std::vector<std::string> ev_ckpts;
    ev_cmd->add_option("--checkpoint", ev_ckpts, "checkpoint file(s)")->required();

    auto* sy_cmd = app.add_subcommand("synth", "generate a synthetic hourly-load CSV");
    std::string sy_out = "synth.csv";
    int sy_series = 8, sy_days = 731;
    double sy_noise = 0.02, sy_shock = 0.0;
    std::uint64_t sy_seed = 42;
    sy_cmd->add_option("--out", sy_out, "output CSV path");
    sy_cmd->add_option("--series", sy_series, "number of series");
    sy_cmd->add_option("--days", sy_days, "days per series");
    sy_cmd->add_option("--noise", sy_noise, "hourly lognormal noise sigma");
    sy_cmd->add_option("--shock", sy_shock, "shared day-level AR(1) shock sigma");
    sy_cmd->add_option("--seed", sy_seed, "generator seed");

    auto* gc_cmd = app.add_subcommand("gradcheck", "end-to-end gradient self-check");
    double gc_tol = 1e-4, gc_eps = 3e-5;
    std::size_t gc_components = 8;
    bool gc_corrupt = false;
    gc_cmd->add_option("--tolerance", gc_tol, "max relative error to pass");
    gc_cmd->add_option("--eps", gc_eps, "central-difference step");
    gc_cmd->add_option("--components", gc_components,
                       "sampled components per tensor (0 = all)");
    gc_cmd->add_flag("--corrupt", gc_corrupt, "negative control: corrupt one gradient");

    try {
        app.parse(argc, argv);
        if (stats_cmd->parsed()) return run_stats(stats_o);
        if (train_cmd->parsed()) return run_train(train_o);
        if (fc_cmd->parsed()) return run_forecast(fc_o, fc_ckpts, fc_series, fc_date);
        if (ev_cmd->parsed()) return run_evaluate(ev_o, ev_ckpts);
        if (sy_cmd->parsed())
            return run_synth(sy_out, sy_series, sy_days, sy_noise, sy_shock, sy_seed);
        if (gc_cmd->parsed()) return run_gradcheck(gc_tol, gc_eps, gc_components, gc_corrupt);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace loadcast
