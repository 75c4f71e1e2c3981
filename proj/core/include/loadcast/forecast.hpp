#pragma once

#include "loadcast/runner.hpp"

namespace loadcast {

struct RollingOptions {
    DayIndex first = 0; // inclusive target-day range to forecast
    DayIndex last = 0;
    /// The recurrent state is warmed by stepping this many days ahead of the
    /// range (ES always rolls from the series start).
    int spin_up_days = 91;
};

/// Day-by-day forecasts of one ensemble member for every (series, day) with a
/// complete input window in the range. Ordered by day, then by series order.
std::vector<ForecastBundle> rolling_forecast(Model& model,
                                             std::span<const HourlyLoadSeries> data,
                                             const std::vector<std::string>& ids,
                                             const RollingOptions& opts);

/// Mean aggregation across ensemble members. Members are deterministic and
/// skip the same days, so bundles align one to one.
std::vector<ForecastBundle> ensemble_rolling_forecast(std::span<Model> members,
                                                      std::span<const HourlyLoadSeries> data,
                                                      const std::vector<std::string>& ids,
                                                      const RollingOptions& opts);

/// Convenience wrapper for a single forecast day.
std::vector<ForecastBundle> forecast_day(std::span<Model> members,
                                         std::span<const HourlyLoadSeries> data,
                                         const std::vector<std::string>& ids, DayIndex day,
                                         int spin_up_days = 91);

} // namespace loadcast
