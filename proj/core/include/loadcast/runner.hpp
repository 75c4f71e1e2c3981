#pragma once

#include <memory>
#include <optional>

#include "loadcast/model.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

/// Output of one main-track series at one daily step.
struct MainStepOutput {
    std::size_t series_index = 0;
    DayIndex day = 0;
    bool stepped = false;    // input window complete, network stepped
    bool has_target = false; // forecast day fully observed
    double zbar = 0.0;
    MainHeadOutput head;
    Var center, lower, upper; // loss-space forecasts (exp(x_hat) * s_hat)
    Tensor target;            // x_out, valid when has_target
    std::vector<Var> s_out;
};

struct DayOutputs {
    DayIndex day = 0;
    Var context_vector; // concatenated r_t (invalid without a context track)
    std::vector<MainStepOutput> mains;
};

/// Steps a batch of main series and the context set through consecutive days
/// on a shared graph, in date lockstep. Training keeps one graph per window
/// and backpropagates through it; rolling forecasts call detach() after every
/// day so memory stays flat while the recurrent state flows on.
///
/// Per-series time is counted in hours from the series start (the ES cursor).
/// A series participates in a day's step only when its cursor is aligned to
/// that day and its trailing week is fully observed; a joined series that
/// skips a day advances its recurrent histories with zero states so dilated
/// lookbacks keep their calendar meaning.
class BatchRunner {
public:
    /// `frozen` (mains then contexts) pins the window-start smoothing states
    /// instead of rolling them from the series start; the gradient check uses
    /// it so finite differences see the same truncation as backward.
    BatchRunner(Model& model, std::vector<const HourlyLoadSeries*> mains,
                std::vector<const HourlyLoadSeries*> contexts, DayIndex begin_day,
                const std::vector<EsState>* frozen = nullptr);

    /// The window-start states a fresh runner would roll to.
    static std::vector<EsState> initial_states(Model& model,
                                               std::span<const HourlyLoadSeries* const> mains,
                                               std::span<const HourlyLoadSeries* const> contexts,
                                               DayIndex begin_day);

    Graph& graph() { return *g_; }
    /// Hands the tape over (for loss builders that outlive the runner);
    /// the runner must not be stepped afterwards.
    std::unique_ptr<Graph> release_graph() { return std::move(g_); }
    DayIndex current_day() const { return day_; }

    /// First day at which every context series can step (their init prefixes
    /// cleared). step() throws before that.
    static DayIndex earliest_context_day(std::span<const HourlyLoadSeries* const> contexts);
    static DayIndex earliest_step_day(const HourlyLoadSeries& series);

    bool main_can_step(std::size_t idx) const;
    bool context_ready() const;

    DayOutputs step();
    void ingest_and_advance();
    void detach();

    /// Real-unit forecasts for a stepped output (reads graph values).
    ForecastBundle bundle(const MainStepOutput& out) const;

private:
    struct Track {
        const HourlyLoadSeries* series = nullptr;
        std::string prefix;
        std::int64_t join_cursor = 0;
        bool joined = false;
        EsState base;
        std::unique_ptr<EsWindow> es;
        NetworkHistory hist;
        Var ialpha, ibeta;
    };

    void init_track(Track& t, const HourlyLoadSeries* s, const std::string& prefix,
                    DayIndex begin_day, const EsState* frozen);
    void attach_graph(bool resume);
    std::int64_t cursor_for(const Track& t, DayIndex day) const {
        return day * 24 - t.series->start;
    }
    bool track_can_step(const Track& t, DayIndex day) const;
    void ingest_track(Track& t, DayIndex day);
    std::span<const double> window_values(const Track& t, std::int64_t from,
                                          std::size_t n) const;

    Model* model_;
    std::vector<Track> mains_;
    std::vector<Track> ctxs_;
    DayIndex day_ = 0;
    std::unique_ptr<Graph> g_;
    NetworkWeights main_w_, ctx_w_;
};

} // namespace loadcast
