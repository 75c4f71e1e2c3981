#pragma once

#include <array>
#include <iosfwd>
#include <optional>

#include "loadcast/forecast.hpp"

namespace loadcast {

/// Percentage-error battery. PE = 100 (z - z_hat) / z; APE = |PE|.
struct PointMetrics {
    double mape = 0.0;
    double mdape = 0.0;
    double iqrape = 0.0;
    double rmse = 0.0;
    double mpe = 0.0;
    double stdpe = 0.0; // population
    std::size_t n = 0;  // scored hours
};

PointMetrics point_metrics(std::span<const double> actual, std::span<const double> forecast);

/// PI assessment: coverage triple plus the normalized Winkler score.
struct PiMetrics {
    double inside_pct = 0.0;
    double below_pct = 0.0;
    double above_pct = 0.0;
    double winkler_mean = 0.0; // each score divided by `normalizer`
    double winkler_std = 0.0;  // population
    std::size_t bound_crossings = 0; // hours with lower > upper
    std::size_t n = 0;
};

/// `normalizer` defaults to the mean of the actuals (the series' mean demand
/// over the scored period).
PiMetrics pi_metrics(std::span<const double> actual, std::span<const double> lower,
                     std::span<const double> upper, double nominal = 0.9,
                     std::optional<double> normalizer = std::nullopt);

/// Day-7 profile copy; unavailable when the source day has gaps.
std::optional<std::array<double, 24>> naive_forecast(const HourlyLoadSeries& series,
                                                     DayIndex day);

struct SeriesEvaluation {
    std::string id;
    PointMetrics point;
    PiMetrics pi;
    bool has_pi = false;
    std::size_t scored_days = 0;
    std::size_t skipped_days = 0; // missing forecast or incomplete actuals
};

struct MetricsReport {
    std::vector<SeriesEvaluation> per_series;
    /// Pooled over the union of all scored hours (how one number summarizes
    /// all countries) plus the mean of the per-series metrics, labeled apart.
    PointMetrics pooled_hours;
    PointMetrics mean_of_series;
    PiMetrics pooled_pi;
    bool has_pi = false;
    std::size_t scored_days = 0;
    std::size_t skipped_days = 0;
};

/// Scores prepared forecasts against the data over an inclusive day range.
/// Days without a bundle or with incomplete actuals are skipped and counted.
MetricsReport evaluate_forecasts(std::span<const HourlyLoadSeries> data,
                                 std::span<const ForecastBundle> bundles,
                                 const std::vector<std::string>& ids, DayIndex first,
                                 DayIndex last);

/// Rolling evaluation of an ensemble over the test range.
MetricsReport rolling_evaluation(std::span<Model> members,
                                 std::span<const HourlyLoadSeries> data,
                                 const std::vector<std::string>& ids,
                                 const RollingOptions& opts);

/// The seasonal-naive baseline over the same protocol.
MetricsReport naive_evaluation(std::span<const HourlyLoadSeries> data,
                               const std::vector<std::string>& ids, DayIndex first,
                               DayIndex last);

/// CSV rows in Table-style column order (per-series rows, then pooled rows).
void write_report_csv(const MetricsReport& report, std::ostream& out);
void write_report_json(const MetricsReport& report, std::ostream& out);

} // namespace loadcast
