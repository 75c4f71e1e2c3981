#pragma once

#include <iosfwd>
#include <map>

#include "loadcast/runner.hpp"

namespace loadcast {

/// Both readings of the sub-epoch clip: the formula as printed (min, at most
/// one scan of the data per epoch) and the max form (N read as a floor).
enum class SubEpochClip { PrintedMin, MaxForm };

struct TrainConfig {
    int epochs = 9;
    std::map<int, double> lr_schedule = {{1, 3e-3}, {6, 1e-3}, {7, 3e-4}, {8, 1e-4}};
    std::map<int, int> batch_schedule = {{1, 2}, {4, 5}};
    int max_window_steps = 50;        // l_o: daily steps per window
    int max_updates_per_epoch = 2000; // N of the sub-epoch formula
    double sub_epoch_power = 0.8;     // p
    int warmup_steps = 7;             // daily steps excluded from the loss
    std::uint64_t seed = 1;
    SubEpochClip clip_mode = SubEpochClip::PrintedMin;
    double grad_norm_cap = 0.0; // 0 = off

    double lr_at(int epoch) const;
    int batch_at(int epoch) const;
    void validate() const;
};

/// n_o = clip((N b / L)^p); PrintedMin clips from above at 1, MaxForm from
/// below at 1.
double sub_epochs(double max_updates, double batch_size, double series_count,
                  double power, SubEpochClip mode = SubEpochClip::PrintedMin);

/// Inclusive range of forecast-target days used for training.
struct DayRange {
    DayIndex first = 0;
    DayIndex last = 0;

    std::int64_t days() const { return last - first + 1; }
};

struct WindowResult {
    bool valid = false;    // at least one scored step
    double loss = 0.0;     // mean over scored (series, day) pairs
    int days = 0;          // daily steps executed
    int scored = 0;        // scored (series, day) pairs
    GradientMap grads;
};

/// The window's mean loss left on its tape (no backward yet); `loss` is
/// invalid when nothing scored. Used by run_window and the end-to-end
/// gradient check.
struct WindowLoss {
    std::shared_ptr<Graph> graph;
    Var loss;
    int days = 0;
    int scored = 0;
};

WindowLoss build_window_loss(Model& model, std::vector<const HourlyLoadSeries*> mains,
                             std::vector<const HourlyLoadSeries*> contexts,
                             DayIndex start_day, DayIndex last_target_day,
                             const TrainConfig& cfg,
                             const std::vector<EsState>* frozen_states = nullptr);

/// One truncated-BPTT window: rolls ES to the start, steps up to `max_steps`
/// days, averages the loss over post-warmup scored steps and runs backward.
/// The optimizer update is the caller's (one Adam step per window).
WindowResult run_window(Model& model, std::vector<const HourlyLoadSeries*> mains,
                        std::vector<const HourlyLoadSeries*> contexts,
                        DayIndex start_day, DayIndex last_target_day,
                        const TrainConfig& cfg);

struct TrainStats {
    int updates = 0;
    int discarded_windows = 0;
    double final_loss = 0.0;
};

/// Full schedule-driven training of one ensemble member. Writes one
/// tab-separated line per update (epoch, update, lr, batch, loss) to `log`
/// when given.
TrainStats train(Model& model, std::span<const HourlyLoadSeries> data,
                 const std::vector<std::string>& main_ids, const DayRange& range,
                 const TrainConfig& cfg, std::ostream* log = nullptr);

} // namespace loadcast
