#include "loadcast/es.hpp"

#include <cmath>

namespace loadcast {

EsState es_init(std::span<const double> values, std::span<const std::uint8_t> missing,
                double ialpha_logit, double ibeta_logit) {
    if (values.size() < kEsInitHours) {
        throw DataError("es_init: series prefix has " + std::to_string(values.size()) +
                        " hours, need " + std::to_string(kEsInitHours));
    }
    auto present = [&](std::size_t i) { return missing.empty() || !missing[i]; };

    // Weekly means over the four init weeks.
    double week_mean[kEsInitWeeks];
    for (int w = 0; w < kEsInitWeeks; ++w) {
        double sum = 0.0;
        int n = 0;
        for (int k = 0; k < kWeekHours; ++k) {
            const std::size_t i = static_cast<std::size_t>(w * kWeekHours + k);
            if (present(i) && values[i] > 0.0) {
                sum += values[i];
                ++n;
            }
        }
        if (n == 0) {
            throw DataError("es_init: init week " + std::to_string(w + 1) + " has no data");
        }
        week_mean[w] = sum / n;
    }

    EsState s;
    s.level = week_mean[0];
    s.seasonal.assign(kWeekHours, 0.0);
    double index_sum = 0.0;
    for (int k = 0; k < kWeekHours; ++k) {
        double sum = 0.0;
        int n = 0;
        for (int w = 0; w < kEsInitWeeks; ++w) {
            const std::size_t i = static_cast<std::size_t>(w * kWeekHours + k);
            if (present(i) && values[i] > 0.0) {
                sum += values[i] / week_mean[w];
                ++n;
            }
        }
        if (n == 0) {
            throw DataError("es_init: weekly slot " + std::to_string(k) +
                            " has no observations in the init prefix");
        }
        s.seasonal[static_cast<std::size_t>(k)] = sum / n;
        index_sum += s.seasonal[static_cast<std::size_t>(k)];
    }
    const double norm = index_sum / kWeekHours;
    for (auto& v : s.seasonal) v /= norm;

    s.alpha = sigmoid_scalar(ialpha_logit);
    s.beta = sigmoid_scalar(ibeta_logit);
    s.cursor = 0;
    return s;
}

void es_update_hour(EsState& state, double z) {
    if (!(z > 0.0)) {
        throw DomainError("es_update_hour: non-positive load " + std::to_string(z));
    }
    const double s_t = state.seasonal_at(state.cursor);
    const double l_new = state.alpha * z / s_t + (1.0 - state.alpha) * state.level;
    const double s_new = state.beta * z / l_new + (1.0 - state.beta) * s_t;
    state.seasonal.push_back(s_new);
    state.level = l_new;
    ++state.cursor;
}

void es_skip_hour(EsState& state) {
    state.seasonal.push_back(state.seasonal_at(state.cursor));
    ++state.cursor;
}

void es_apply_corrections(EsState& state, double ialpha_logit, double ibeta_logit,
                          double dalpha, double dbeta) {
    if (!std::isfinite(dalpha) || !std::isfinite(dbeta)) {
        throw DomainError("es_apply_corrections: non-finite correction");
    }
    state.alpha = sigmoid_scalar(ialpha_logit + dalpha);
    state.beta = sigmoid_scalar(ibeta_logit + dbeta);
}

std::vector<double> predict_seasonals(const EsState& state, int horizon) {
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int i = 0; i < horizon; ++i) {
        out[static_cast<std::size_t>(i)] = state.seasonal_at(state.cursor + i);
    }
    return out;
}

EsState es_roll(const HourlyLoadSeries& series, std::int64_t hours,
                double ialpha_logit, double ibeta_logit) {
    if (hours > static_cast<std::int64_t>(series.size())) {
        throw DataError("es_roll: past the end of series " + series.id);
    }
    EsState s = es_init(series.values, series.missing, ialpha_logit, ibeta_logit);
    s.seasonal.reserve(static_cast<std::size_t>(hours) + kWeekHours);
    for (std::int64_t h = 0; h < hours; ++h) {
        const std::size_t i = static_cast<std::size_t>(h);
        if (series.missing[i] || !(series.values[i] > 0.0)) {
            es_skip_hour(s);
        } else {
            es_update_hour(s, series.values[i]);
        }
    }
    return s;
}

EsWindow::EsWindow(Graph& g, const EsState& snapshot, Var ialpha_logit, Var ibeta_logit,
                   bool resume)
    : g_(&g), ialpha_(ialpha_logit), ibeta_(ibeta_logit), cursor_(snapshot.cursor) {
    level_ = g.constant(snapshot.level);
    if (resume) {
        alpha_ = g.constant(snapshot.alpha);
        beta_ = g.constant(snapshot.beta);
    } else {
        // The window opens with zero corrections: alpha = sigmoid(Ialpha).
        alpha_ = loadcast::sigmoid(ialpha_);
        beta_ = loadcast::sigmoid(ibeta_);
    }
    one_minus_alpha_ = 1.0 - alpha_;
    one_minus_beta_ = 1.0 - beta_;

    // Seed the journal with one week of history (for deseasonalizing the
    // input window) plus the week ahead written by pre-window smoothing.
    journal_base_ = std::max<std::int64_t>(0, cursor_ - kWeekHours);
    const std::int64_t journal_end = cursor_ + kWeekHours;
    journal_.reserve(static_cast<std::size_t>(journal_end - journal_base_) + 24 * 64);
    for (std::int64_t tau = journal_base_; tau < journal_end; ++tau) {
        journal_.push_back(g.constant(snapshot.seasonal_at(tau)));
    }
}

void EsWindow::ingest_day(std::span<const double> z, std::span<const std::uint8_t> missing) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        Var s_t = seasonal_at(cursor_);
        if (!missing.empty() && missing[i]) {
            journal_.push_back(s_t);
        } else {
            Var zc = g_->constant(z[i]);
            level_ = alpha_ * (zc / s_t) + one_minus_alpha_ * level_;
            journal_.push_back(beta_ * (zc / level_) + one_minus_beta_ * s_t);
        }
        ++cursor_;
    }
}

void EsWindow::apply_corrections(Var dalpha, Var dbeta) {
    alpha_ = loadcast::sigmoid(ialpha_ + dalpha);
    beta_ = loadcast::sigmoid(ibeta_ + dbeta);
    one_minus_alpha_ = 1.0 - alpha_;
    one_minus_beta_ = 1.0 - beta_;
}

Var EsWindow::seasonal_at(std::int64_t tau) const {
    const std::int64_t idx = tau - journal_base_;
    if (idx < 0 || idx >= static_cast<std::int64_t>(journal_.size())) {
        throw std::logic_error("EsWindow: seasonal index " + std::to_string(tau) +
                               " outside the tracked journal range");
    }
    return journal_[static_cast<std::size_t>(idx)];
}

std::vector<Var> EsWindow::seasonal_range(std::int64_t from, int n) const {
    std::vector<Var> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(seasonal_at(from + i));
    return out;
}

std::vector<Var> EsWindow::predict_seasonals(int horizon) const {
    return seasonal_range(cursor_, horizon);
}

EsState EsWindow::snapshot() const {
    EsState s;
    s.level = g_->scalar(level_);
    s.alpha = g_->scalar(alpha_);
    s.beta = g_->scalar(beta_);
    s.cursor = cursor_;
    // Rebuild a journal covering [0, cursor+168); hours before the tracked
    // range are irrelevant for further stepping and zero-filled.
    s.seasonal.assign(static_cast<std::size_t>(cursor_ + kWeekHours), 0.0);
    for (std::size_t i = 0; i < journal_.size(); ++i) {
        const std::int64_t tau = journal_base_ + static_cast<std::int64_t>(i);
        if (tau < static_cast<std::int64_t>(s.seasonal.size())) {
            s.seasonal[static_cast<std::size_t>(tau)] = g_->scalar(journal_[i]);
        }
    }
    return s;
}

} // namespace loadcast
