#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "loadcast/graph.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

inline constexpr int kWeekHours = 168;
inline constexpr int kEsInitWeeks = 4;
inline constexpr int kEsInitHours = kEsInitWeeks * kWeekHours; // 672

/// Inverse sigmoid of 0.2; default for the learnable initial coefficients.
inline constexpr double kDefaultSmoothingLogit = -1.3862943611198906;

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Per-series smoothing state: a level and a journal of weekly seasonal
/// indices. seasonal[tau] is the index in effect at hour tau (hours counted
/// from the series start); ingesting hour tau writes seasonal[tau + 168],
/// so the journal always extends 168 hours past the cursor.
struct EsState {
    double level = 1.0;
    std::vector<double> seasonal;
    double alpha = 0.2;
    double beta = 0.2;
    std::int64_t cursor = 0; // hours ingested

    double seasonal_at(std::int64_t tau) const {
        return seasonal[static_cast<std::size_t>(tau)];
    }
};

/// Seeds level and the 168 seasonal indices from the first four weeks of the
/// series (level = mean of week one; index = mean over weeks of value over
/// weekly mean, renormalized to average exactly one). alpha/beta start at
/// sigmoid of the initial logits.
EsState es_init(std::span<const double> values, std::span<const std::uint8_t> missing,
                double ialpha_logit = kDefaultSmoothingLogit,
                double ibeta_logit = kDefaultSmoothingLogit);

/// Level first (with the pre-update index), then the index one week ahead
/// (with the post-update level). z must be positive.
void es_update_hour(EsState& state, double z);

/// Advances past an unobserved hour: level holds, the week-ahead index is
/// copied from the current one.
void es_skip_hour(EsState& state);

void es_apply_corrections(EsState& state, double ialpha_logit, double ibeta_logit,
                          double dalpha, double dbeta);

/// Seasonal indices for the next `horizon` hours (the forecast window).
std::vector<double> predict_seasonals(const EsState& state, int horizon = 24);

/// Rolls a fresh state from the series start to `hours` ingested hours with
/// zero corrections.
EsState es_roll(const HourlyLoadSeries& series, std::int64_t hours,
                double ialpha_logit = kDefaultSmoothingLogit,
                double ibeta_logit = kDefaultSmoothingLogit);

/// Differentiable continuation of an EsState inside a training window.
/// The snapshot enters the graph as constants (gradients are truncated at
/// the window start); in-window updates are recorded on the tape so the
/// loss reaches the initial logits and, through the corrections, the network.
class EsWindow {
public:
    /// With `resume` the snapshot's current alpha/beta enter as constants
    /// (forward-only continuation); otherwise the window opens with zero
    /// corrections, alpha = sigmoid(Ialpha), so gradients reach the logits.
    EsWindow(Graph& g, const EsState& snapshot, Var ialpha_logit, Var ibeta_logit,
             bool resume = false);

    /// 24 hourly updates for the day starting at absolute cursor position.
    void ingest_day(std::span<const double> z, std::span<const std::uint8_t> missing);

    /// alpha_{t+1} = sigmoid(Ialpha + dalpha), same for beta.
    void apply_corrections(Var dalpha, Var dbeta);

    Var seasonal_at(std::int64_t tau) const; // tau in series-hours
    std::vector<Var> seasonal_range(std::int64_t from, int n) const;
    std::vector<Var> predict_seasonals(int horizon = 24) const;

    Var alpha() const { return alpha_; }
    Var beta() const { return beta_; }
    Var level() const { return level_; }
    std::int64_t cursor() const { return cursor_; }

    /// Numeric state extraction, used to re-seed a fresh graph when stepping
    /// forward in inference mode.
    EsState snapshot() const;

private:
    Graph* g_;
    Var ialpha_;
    Var ibeta_;
    Var level_;
    Var alpha_, one_minus_alpha_;
    Var beta_, one_minus_beta_;
    std::int64_t cursor_;
    std::int64_t journal_base_;      // series-hour of journal_[0]
    std::vector<Var> journal_;       // seasonal indices from base on
};

} // namespace loadcast
