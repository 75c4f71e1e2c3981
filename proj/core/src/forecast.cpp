#include "loadcast/forecast.hpp"

namespace loadcast {

std::vector<ForecastBundle> rolling_forecast(Model& model,
                                             std::span<const HourlyLoadSeries> data,
                                             const std::vector<std::string>& ids,
                                             const RollingOptions& opts) {
    if (opts.last < opts.first) {
        throw DataError("rolling_forecast: empty day range");
    }
    std::vector<const HourlyLoadSeries*> mains;
    for (const auto& id : ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("rolling_forecast: series '" + id + "' not in the dataset");
        mains.push_back(s);
    }
    std::vector<const HourlyLoadSeries*> contexts;
    for (const auto& id : model.context_ids) {
        const HourlyLoadSeries* s = find_series(data, id);
        if (!s) throw DataError("rolling_forecast: context series '" + id + "' missing");
        contexts.push_back(s);
    }

    DayIndex begin = opts.first - opts.spin_up_days;
    DayIndex floor_day = 0;
    bool have_floor = false;
    for (const auto* s : mains) {
        const DayIndex d = BatchRunner::earliest_step_day(*s);
        floor_day = have_floor ? std::min(floor_day, d) : d;
        have_floor = true;
    }
    if (model.cfg.use_context) {
        floor_day = std::max(floor_day, BatchRunner::earliest_context_day(contexts));
    }
    begin = std::max(begin, floor_day);
    if (begin > opts.last) {
        throw DataError("rolling_forecast: no series can step inside the range");
    }

    BatchRunner runner(model, mains, contexts, begin);
    std::vector<ForecastBundle> bundles;
    for (DayIndex day = begin; day <= opts.last; ++day) {
        DayOutputs outs = runner.step();
        if (day >= opts.first) {
            for (const MainStepOutput& mo : outs.mains) {
                if (mo.stepped) bundles.push_back(runner.bundle(mo));
            }
        }
        runner.ingest_and_advance();
        runner.detach();
    }
    return bundles;
}

std::vector<ForecastBundle> ensemble_rolling_forecast(std::span<Model> members,
                                                      std::span<const HourlyLoadSeries> data,
                                                      const std::vector<std::string>& ids,
                                                      const RollingOptions& opts) {
    if (members.empty()) {
        throw DataError("ensemble_rolling_forecast: no members");
    }
    std::vector<ForecastBundle> acc = rolling_forecast(members[0], data, ids, opts);
    for (std::size_t m = 1; m < members.size(); ++m) {
        std::vector<ForecastBundle> next = rolling_forecast(members[m], data, ids, opts);
        if (next.size() != acc.size()) {
            throw DataError("ensemble_rolling_forecast: members disagree on forecastable days");
        }
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (next[i].series_id != acc[i].series_id || next[i].day != acc[i].day) {
                throw DataError("ensemble_rolling_forecast: member outputs misaligned");
            }
            for (int h = 0; h < 24; ++h) {
                acc[i].point[h] += next[i].point[h];
                acc[i].lower[h] += next[i].lower[h];
                acc[i].upper[h] += next[i].upper[h];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (auto& b : acc) {
        for (int h = 0; h < 24; ++h) {
            b.point[h] *= inv;
            b.lower[h] *= inv;
            b.upper[h] *= inv;
        }
    }
    return acc;
}

std::vector<ForecastBundle> forecast_day(std::span<Model> members,
                                         std::span<const HourlyLoadSeries> data,
                                         const std::vector<std::string>& ids, DayIndex day,
                                         int spin_up_days) {
    RollingOptions opts;
    opts.first = day;
    opts.last = day;
    opts.spin_up_days = spin_up_days;
    return ensemble_rolling_forecast(members, data, ids, opts);
}

} // namespace loadcast
