#include "loadcast/trainer.hpp"

#include <cmath>
#include <ostream>

namespace loadcast {

namespace {

template <typename T>
T schedule_at(const std::map<int, T>& schedule, int epoch, const char* what) {
    auto it = schedule.upper_bound(epoch);
    if (it == schedule.begin()) {
        throw std::invalid_argument(std::string("train: no ") + what +
                                    " scheduled for epoch " + std::to_string(epoch));
    }
    return std::prev(it)->second;
}

} // namespace

double TrainConfig::lr_at(int epoch) const { return schedule_at(lr_schedule, epoch, "lr"); }
int TrainConfig::batch_at(int epoch) const {
    return schedule_at(batch_schedule, epoch, "batch size");
}

void TrainConfig::validate() const {
    if (epochs < 1 || max_window_steps < 1 || max_updates_per_epoch < 1) {
        throw std::invalid_argument("train: epochs, window steps and max updates must be >= 1");
    }
    if (warmup_steps < 0 || warmup_steps >= max_window_steps) {
        throw std::invalid_argument("train: warmup must lie in [0, window steps)");
    }
    if (sub_epoch_power < 0.0 || sub_epoch_power > 1.0) {
        throw std::invalid_argument("train: sub-epoch power must lie in [0, 1]");
    }
    for (int e = 1; e <= epochs; ++e) {
        (void)lr_at(e);
        (void)batch_at(e);
    }
}

double sub_epochs(double max_updates, double batch_size, double series_count,
                  double power, SubEpochClip mode) {
    if (!(max_updates > 0.0 && batch_size > 0.0 && series_count > 0.0)) {
        throw std::invalid_argument("sub_epochs: all quantities must be positive");
    }
    const double raw = std::pow(max_updates * batch_size / series_count, power);
    return mode == SubEpochClip::PrintedMin ? std::min(1.0, raw) : std::max(1.0, raw);
}

WindowLoss build_window_loss(Model& model, std::vector<const HourlyLoadSeries*> mains,
                             std::vector<const HourlyLoadSeries*> contexts,
                             DayIndex start_day, DayIndex last_target_day,
                             const TrainConfig& cfg,
                             const std::vector<EsState>* frozen_states) {
    WindowLoss out;
    BatchRunner runner(model, std::move(mains), std::move(contexts), start_day,
                       frozen_states);
    Graph& g = runner.graph();

    std::vector<Var> losses;
    for (int k = 0; k < cfg.max_window_steps; ++k) {
        const DayIndex day = start_day + k;
        if (day > last_target_day) break;
        DayOutputs outs = runner.step();
        if (k >= cfg.warmup_steps) {
            for (const MainStepOutput& mo : outs.mains) {
                if (!mo.stepped || !mo.has_target) continue;
                losses.push_back(step_loss(g, mo.target, mo.center, mo.lower, mo.upper,
                                           model.cfg.loss));
            }
        }
        runner.ingest_and_advance();
        ++out.days;
    }
    out.scored = static_cast<int>(losses.size());
    if (!losses.empty()) {
        Var total = losses[0];
        for (std::size_t i = 1; i < losses.size(); ++i) total = total + losses[i];
        out.loss = total * (1.0 / static_cast<double>(losses.size()));
    }
    out.graph = runner.release_graph();
    return out;
}

WindowResult run_window(Model& model, std::vector<const HourlyLoadSeries*> mains,
                        std::vector<const HourlyLoadSeries*> contexts,
                        DayIndex start_day, DayIndex last_target_day,
                        const TrainConfig& cfg) {
    WindowLoss wl = build_window_loss(model, std::move(mains), std::move(contexts),
                                      start_day, last_target_day, cfg);
    WindowResult out;
    out.days = wl.days;
    out.scored = wl.scored;
    if (wl.scored == 0) {
        return out; // no scored step: window discarded
    }
    wl.graph->backward(wl.loss);
    out.valid = true;
    out.loss = wl.graph->scalar(wl.loss);
    out.grads = wl.graph->gradients();
    return out;
}

TrainStats train(Model& model, std::span<const HourlyLoadSeries> data,
                 const std::vector<std::string>& main_ids, const DayRange& range,
                 const TrainConfig& cfg, std::ostream* log) {
    cfg.validate();
    if (main_ids.empty()) {
        throw DataError("train: no main series");
    }

    std::vector<const HourlyLoadSeries*> mains;
    mains.reserve(main_ids.size());
    for (const auto& id : main_ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("train: series '" + id + "' not in the dataset");
        model.ensure_main_series(id);
        mains.push_back(s);
    }
    std::vector<const HourlyLoadSeries*> contexts;
    for (const auto& id : model.context_ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("train: context series '" + id + "' not in the dataset");
        contexts.push_back(s);
    }
    const DayIndex context_floor =
        model.cfg.use_context ? BatchRunner::earliest_context_day(contexts) : 0;
    const DayIndex last_start = range.last - cfg.warmup_steps;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick_series(0, mains.size() - 1);

    TrainStats stats;
    const double L = static_cast<double>(mains.size());
    if (log) {
        *log << "epoch\tupdate\tlr\tbatch\tloss\n";
    }

    AdamSettings adam;
    adam.grad_norm_cap = cfg.grad_norm_cap;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double lr = cfg.lr_at(epoch);
        const int b = cfg.batch_at(epoch);
        const double n_o = sub_epochs(cfg.max_updates_per_epoch, b, L,
                                      cfg.sub_epoch_power, cfg.clip_mode);
        const long updates = std::lround(n_o * L / b);

        for (long u = 0; u < updates; ++u) {
            WindowResult res;
            for (int attempt = 0; attempt < 64 && !res.valid; ++attempt) {
                std::vector<const HourlyLoadSeries*> batch;
                batch.reserve(static_cast<std::size_t>(b));
                DayIndex lo = context_floor;
                for (int j = 0; j < b; ++j) {
                    const HourlyLoadSeries* s = mains[pick_series(rng)];
                    batch.push_back(s);
                }
                DayIndex batch_first = BatchRunner::earliest_step_day(*batch[0]);
                for (const auto* s : batch) {
                    batch_first = std::min(batch_first, BatchRunner::earliest_step_day(*s));
                }
                lo = std::max(lo, std::max(batch_first, range.first));
                if (lo > last_start) {
                    ++stats.discarded_windows;
                    continue;
                }
                std::uniform_int_distribution<DayIndex> pick_day(lo, last_start);
                const DayIndex start = pick_day(rng);
                res = run_window(model, std::move(batch), contexts, start, range.last, cfg);
                if (!res.valid) ++stats.discarded_windows;
            }
            if (!res.valid) {
                throw DataError("train: could not draw a window with any scorable step");
            }
            model.params.adam_step(res.grads, lr, adam);
            ++stats.updates;
            stats.final_loss = res.loss;
            if (log) {
                *log << epoch << '\t' << stats.updates << '\t' << lr << '\t' << b << '\t'
                     << res.loss << '\n';
            }
        }
    }
    return stats;
}

} // namespace loadcast
