#include "loadcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

namespace loadcast {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Linear-interpolation quantile on a sorted vector (the common "type 7").
double quantile_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

PointMetrics point_metrics(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size()) {
        throw ShapeError("point_metrics: " + std::to_string(actual.size()) + " actuals vs " +
                         std::to_string(forecast.size()) + " forecasts");
    }
    if (actual.empty()) {
        throw DataError("point_metrics: nothing to score");
    }
    const std::size_t n = actual.size();
    std::vector<double> pe(n), ape(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(actual[i] > 0.0)) {
            throw DataError("point_metrics: non-positive actual at index " + std::to_string(i));
        }
        pe[i] = 100.0 * (actual[i] - forecast[i]) / actual[i];
        ape[i] = std::abs(pe[i]);
        const double e = actual[i] - forecast[i];
        sq += e * e;
    }
    PointMetrics m;
    m.n = n;
    m.mape = mean_of(ape);
    m.mpe = mean_of(pe);
    m.stdpe = population_std(pe, m.mpe);
    m.rmse = std::sqrt(sq / static_cast<double>(n));
    std::sort(ape.begin(), ape.end());
    m.mdape = quantile_sorted(ape, 0.5);
    m.iqrape = quantile_sorted(ape, 0.75) - quantile_sorted(ape, 0.25);
    return m;
}

PiMetrics pi_metrics(std::span<const double> actual, std::span<const double> lower,
                     std::span<const double> upper, double nominal,
                     std::optional<double> normalizer) {
    if (actual.size() != lower.size() || actual.size() != upper.size()) {
        throw ShapeError("pi_metrics: length mismatch");
    }
    if (actual.empty()) {
        throw DataError("pi_metrics: nothing to score");
    }
    if (!(nominal > 0.0 && nominal < 1.0)) {
        throw DomainError("pi_metrics: nominal coverage outside (0,1)");
    }
    const double alpha = 1.0 - nominal;
    const double norm = normalizer ? *normalizer : mean_of(actual);
    if (!(norm > 0.0)) {
        throw DomainError("pi_metrics: non-positive normalizer");
    }

    const std::size_t n = actual.size();
    std::size_t inside = 0, below = 0, above = 0, crossings = 0;
    std::vector<double> winkler(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = actual[i], l = lower[i], u = upper[i];
        if (l > u) ++crossings;
        double w = u - l;
        if (z < l) {
            ++below;
            w += 2.0 / alpha * (l - z);
        } else if (z > u) {
            ++above;
            w += 2.0 / alpha * (z - u);
        } else {
            ++inside;
        }
        winkler[i] = w / norm;
    }
    PiMetrics m;
    m.n = n;
    m.bound_crossings = crossings;
    m.inside_pct = 100.0 * static_cast<double>(inside) / static_cast<double>(n);
    m.below_pct = 100.0 * static_cast<double>(below) / static_cast<double>(n);
    m.above_pct = 100.0 * static_cast<double>(above) / static_cast<double>(n);
    m.winkler_mean = mean_of(winkler);
    m.winkler_std = population_std(winkler, m.winkler_mean);
    return m;
}

std::optional<std::array<double, 24>> naive_forecast(const HourlyLoadSeries& series,
                                                     DayIndex day) {
    const HourIndex src = (day - 7) * 24;
    if (src < series.start || src + 24 > series.end() || !series.complete(src, 24)) {
        return std::nullopt;
    }
    std::array<double, 24> out{};
    const std::size_t off = static_cast<std::size_t>(src - series.start);
    for (int h = 0; h < 24; ++h) {
        out[static_cast<std::size_t>(h)] = series.values[off + static_cast<std::size_t>(h)];
    }
    return out;
}

namespace {

struct Pool {
    std::vector<double> actual, point, lower, upper;
};

MetricsReport score_pools(const std::vector<std::string>& ids,
                          const std::map<std::string, Pool>& pools, bool has_pi,
                          std::size_t scored_days, std::size_t skipped_days) {
    MetricsReport report;
    report.has_pi = has_pi;
    report.scored_days = scored_days;
    report.skipped_days = skipped_days;
    Pool all;
    std::vector<double> norm_actual_all;

    for (const auto& id : ids) {
        auto it = pools.find(id);
        if (it == pools.end() || it->second.actual.empty()) continue;
        const Pool& p = it->second;
        SeriesEvaluation ev;
        ev.id = id;
        ev.point = point_metrics(p.actual, p.point);
        if (has_pi) {
            ev.pi = pi_metrics(p.actual, p.lower, p.upper);
            ev.has_pi = true;
        }
        ev.scored_days = p.actual.size() / 24;
        report.per_series.push_back(ev);

        all.actual.insert(all.actual.end(), p.actual.begin(), p.actual.end());
        all.point.insert(all.point.end(), p.point.begin(), p.point.end());
        if (has_pi) {
            // Pool Winkler in normalized units so countries are comparable.
            const double norm = mean_of(p.actual);
            for (std::size_t i = 0; i < p.actual.size(); ++i) {
                all.lower.push_back(p.lower[i] / norm);
                all.upper.push_back(p.upper[i] / norm);
                norm_actual_all.push_back(p.actual[i] / norm);
            }
        }
    }
    if (all.actual.empty()) {
        throw DataError("evaluation: no (series, day) pair could be scored");
    }
    report.pooled_hours = point_metrics(all.actual, all.point);
    if (has_pi) {
        report.pooled_pi = pi_metrics(norm_actual_all, all.lower, all.upper, 0.9, 1.0);
    }

    // Mean of the per-series metric values, reported alongside the pooled row.
    PointMetrics& m = report.mean_of_series;
    for (const auto& ev : report.per_series) {
        m.mape += ev.point.mape;
        m.mdape += ev.point.mdape;
        m.iqrape += ev.point.iqrape;
        m.rmse += ev.point.rmse;
        m.mpe += ev.point.mpe;
        m.stdpe += ev.point.stdpe;
        m.n += ev.point.n;
    }
    const double k = static_cast<double>(report.per_series.size());
    m.mape /= k;
    m.mdape /= k;
    m.iqrape /= k;
    m.rmse /= k;
    m.mpe /= k;
    m.stdpe /= k;
    return report;
}

} // namespace

MetricsReport evaluate_forecasts(std::span<const HourlyLoadSeries> data,
                                 std::span<const ForecastBundle> bundles,
                                 const std::vector<std::string>& ids, DayIndex first,
                                 DayIndex last) {
    std::map<std::pair<std::string, DayIndex>, const ForecastBundle*> by_key;
    for (const auto& b : bundles) {
        by_key[{b.series_id, b.day}] = &b;
    }
    std::map<std::string, Pool> pools;
    std::size_t scored_days = 0, skipped_days = 0;
    for (const auto& id : ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("evaluation: series '" + id + "' not in the dataset");
        Pool& pool = pools[id];
        for (DayIndex day = first; day <= last; ++day) {
            auto it = by_key.find({id, day});
            const HourIndex h0 = day * 24;
            if (it == by_key.end() || h0 < s->start || h0 + 24 > s->end() ||
                !s->complete(h0, 24)) {
                ++skipped_days;
                continue;
            }
            const std::size_t off = static_cast<std::size_t>(h0 - s->start);
            for (int h = 0; h < 24; ++h) {
                pool.actual.push_back(s->values[off + static_cast<std::size_t>(h)]);
                pool.point.push_back(it->second->point[static_cast<std::size_t>(h)]);
                pool.lower.push_back(it->second->lower[static_cast<std::size_t>(h)]);
                pool.upper.push_back(it->second->upper[static_cast<std::size_t>(h)]);
            }
            ++scored_days;
        }
    }
    return score_pools(ids, pools, true, scored_days, skipped_days);
}

MetricsReport rolling_evaluation(std::span<Model> members,
                                 std::span<const HourlyLoadSeries> data,
                                 const std::vector<std::string>& ids,
                                 const RollingOptions& opts) {
    const std::vector<ForecastBundle> bundles =
        ensemble_rolling_forecast(members, data, ids, opts);
    return evaluate_forecasts(data, bundles, ids, opts.first, opts.last);
}

MetricsReport naive_evaluation(std::span<const HourlyLoadSeries> data,
                               const std::vector<std::string>& ids, DayIndex first,
                               DayIndex last) {
    std::map<std::string, Pool> pools;
    std::size_t scored_days = 0, skipped_days = 0;
    for (const auto& id : ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("evaluation: series '" + id + "' not in the dataset");
        Pool& pool = pools[id];
        for (DayIndex day = first; day <= last; ++day) {
            const HourIndex h0 = day * 24;
            auto fc = naive_forecast(*s, day);
            if (!fc || h0 < s->start || h0 + 24 > s->end() || !s->complete(h0, 24)) {
                ++skipped_days;
                continue;
            }
            const std::size_t off = static_cast<std::size_t>(h0 - s->start);
            for (int h = 0; h < 24; ++h) {
                pool.actual.push_back(s->values[off + static_cast<std::size_t>(h)]);
                pool.point.push_back((*fc)[static_cast<std::size_t>(h)]);
            }
            ++scored_days;
        }
    }
    return score_pools(ids, pools, false, scored_days, skipped_days);
}

namespace {

void csv_point_row(std::ostream& out, const std::string& label, const PointMetrics& p,
                   const PiMetrics* pi, std::size_t scored, std::size_t skipped) {
    out << label << ',' << p.mape << ',' << p.mdape << ',' << p.iqrape << ',' << p.rmse
        << ',' << p.mpe << ',' << p.stdpe << ',';
    if (pi) {
        out << pi->inside_pct << ',' << pi->below_pct << ',' << pi->above_pct << ','
            << pi->winkler_mean << ',' << pi->winkler_std;
    } else {
        out << ",,,,";
    }
    out << ',' << scored << ',' << skipped << '\n';
}

nlohmann::json point_json(const PointMetrics& p) {
    return {{"mape", p.mape},   {"mdape", p.mdape}, {"iqrape", p.iqrape},
            {"rmse", p.rmse},   {"mpe", p.mpe},     {"stdpe", p.stdpe},
            {"hours", p.n}};
}

nlohmann::json pi_json(const PiMetrics& p) {
    return {{"inside_pct", p.inside_pct},
            {"below_pct", p.below_pct},
            {"above_pct", p.above_pct},
            {"winkler_mean", p.winkler_mean},
            {"winkler_std", p.winkler_std},
            {"bound_crossings", p.bound_crossings}};
}

} // namespace

void write_report_csv(const MetricsReport& report, std::ostream& out) {
    out << "series,MAPE,MdAPE,IqrAPE,RMSE,MPE,StdPE,"
           "pi_inside,pi_below,pi_above,winkler_mean,winkler_std,scored_days,skipped_days\n";
    for (const auto& ev : report.per_series) {
        csv_point_row(out, ev.id, ev.point, ev.has_pi ? &ev.pi : nullptr, ev.scored_days,
                      ev.skipped_days);
    }
    csv_point_row(out, "pooled_hours", report.pooled_hours,
                  report.has_pi ? &report.pooled_pi : nullptr, report.scored_days,
                  report.skipped_days);
    csv_point_row(out, "mean_of_series", report.mean_of_series, nullptr, report.scored_days,
                  report.skipped_days);
}

void write_report_json(const MetricsReport& report, std::ostream& out) {
    nlohmann::json j;
    j["scored_days"] = report.scored_days;
    j["skipped_days"] = report.skipped_days;
    j["pooled_hours"] = point_json(report.pooled_hours);
    j["mean_of_series"] = point_json(report.mean_of_series);
    if (report.has_pi) {
        j["pooled_pi"] = pi_json(report.pooled_pi);
    }
    nlohmann::json per = nlohmann::json::array();
    for (const auto& ev : report.per_series) {
        nlohmann::json e;
        e["series"] = ev.id;
        e["point"] = point_json(ev.point);
        if (ev.has_pi) e["pi"] = pi_json(ev.pi);
        e["scored_days"] = ev.scored_days;
        e["skipped_days"] = ev.skipped_days;
        per.push_back(e);
    }
    j["series"] = per;
    out << j.dump(2) << '\n';
}

} // namespace loadcast
