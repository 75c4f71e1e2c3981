#pragma once

#include <span>
#include <string>
#include <vector>

#include "loadcast/series.hpp"

namespace loadcast {

/// Share (percent) of series variance carried by the harmonic of the given
/// period: 100 * A^2 / (2 Var), with A the amplitude of the discrete Fourier
/// bin closest to frequency 1/period over the span.
double h_ratio(std::span<const double> values, std::size_t period_hours);

/// h_ratio over the series restricted to [span_begin, span_end); the series
/// must be complete there.
double h_ratio(const HourlyLoadSeries& series, std::size_t period_hours,
               HourIndex span_begin, HourIndex span_end);

struct SummaryStats {
    double mean_demand = 0.0;     // over non-missing hours
    double mean_daily_std = 0.0;  // mean over complete days of the within-day std
};

SummaryStats summary_stats(const HourlyLoadSeries& series);

/// Series ids with zero missing hours across [span_begin, span_end),
/// alphabetically ordered. Throws DataError when none qualify.
std::vector<std::string> context_set(std::span<const HourlyLoadSeries> series,
                                     HourIndex span_begin, HourIndex span_end);

} // namespace loadcast
