#include "loadcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loadcast {

double h_ratio(std::span<const double> values, std::size_t period_hours) {
    if (period_hours != 24 && period_hours != 168 && period_hours != 8760) {
        throw DataError("h_ratio: unsupported period " + std::to_string(period_hours));
    }
    const std::size_t n = values.size();
    if (n < period_hours) {
        throw DataError("h_ratio: span of " + std::to_string(n) +
                        " hours is shorter than one period (" +
                        std::to_string(period_hours) + ")");
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var == 0.0) return 0.0;

    // Single-bin DFT at the bin closest to frequency 1/period.
    const std::size_t k = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / static_cast<double>(period_hours)));
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double ph = w * static_cast<double>(t);
        const double v = values[t] - mean;
        re += v * std::cos(ph);
        im -= v * std::sin(ph);
    }
    const double amplitude = 2.0 * std::sqrt(re * re + im * im) / static_cast<double>(n);
    return 100.0 * amplitude * amplitude / (2.0 * var);
}

double h_ratio(const HourlyLoadSeries& series, std::size_t period_hours,
               HourIndex span_begin, HourIndex span_end) {
    if (span_begin < series.start || span_end > series.end() || span_end <= span_begin) {
        throw DataError("h_ratio: span outside series " + series.id);
    }
    const std::size_t n = static_cast<std::size_t>(span_end - span_begin);
    if (!series.complete(span_begin, n)) {
        throw DataError("h_ratio: series " + series.id + " has gaps in the analysis span");
    }
    const std::size_t off = static_cast<std::size_t>(span_begin - series.start);
    return h_ratio(std::span<const double>(series.values.data() + off, n), period_hours);
}

SummaryStats summary_stats(const HourlyLoadSeries& series) {
    SummaryStats out;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.missing[i]) {
            sum += series.values[i];
            ++count;
        }
    }
    if (count == 0) {
        throw DataError("summary_stats: series " + series.id + " has no observations");
    }
    out.mean_demand = sum / static_cast<double>(count);

    // Daily dispersion over complete days, aligned to UTC midnights.
    const DayIndex first_day = day_of_hour(series.start + 23) ; // first day fully covered
    const DayIndex last_day = day_of_hour(series.end() - 1);
    double disp_sum = 0.0;
    std::size_t days = 0;
    for (DayIndex d = first_day; d <= last_day; ++d) {
        const HourIndex h0 = d * 24;
        if (h0 < series.start || h0 + 24 > series.end()) continue;
        if (!series.complete(h0, 24)) continue;
        const std::size_t off = static_cast<std::size_t>(h0 - series.start);
        double m = 0.0;
        for (int i = 0; i < 24; ++i) m += series.values[off + static_cast<std::size_t>(i)];
        m /= 24.0;
        double v = 0.0;
        for (int i = 0; i < 24; ++i) {
            const double dlt = series.values[off + static_cast<std::size_t>(i)] - m;
            v += dlt * dlt;
        }
        disp_sum += std::sqrt(v / 24.0);
        ++days;
    }
    out.mean_daily_std = days > 0 ? disp_sum / static_cast<double>(days) : 0.0;
    return out;
}

std::vector<std::string> context_set(std::span<const HourlyLoadSeries> series,
                                     HourIndex span_begin, HourIndex span_end) {
    std::vector<std::string> ids;
    for (const auto& s : series) {
        if (span_begin < s.start || span_end > s.end()) continue;
        if (s.complete(span_begin, static_cast<std::size_t>(span_end - span_begin))) {
            ids.push_back(s.id);
        }
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) {
        throw DataError("context_set: no series is complete over the training span");
    }
    return ids;
}

} // namespace loadcast
