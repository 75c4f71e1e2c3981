#pragma once

#include <vector>

#include "loadcast/tensor.hpp"
#include "loadcast/timeutil.hpp"

namespace loadcast {

inline constexpr int kDayOfWeekSlots = 7;
inline constexpr int kDayOfMonthSlots = 31;
inline constexpr int kWeekOfYearSlots = 52;
inline constexpr int kCalendarSlots =
    kDayOfWeekSlots + kDayOfMonthSlots + kWeekOfYearSlots; // 90

/// One-hot calendar encoding of a forecasted day: day of week (7),
/// day of month (31) and week of year (52). ISO week 53 is folded into
/// slot 52 to keep the fixed layout.
struct CalendarFeatures {
    int day_of_week = 1;  // 1..7, Monday=1
    int day_of_month = 1; // 1..31
    int week_of_year = 1; // 1..52

    /// 90 slots with exactly three ones.
    std::vector<double> onehot() const;
};

CalendarFeatures calendar_onehots(const CivilDate& date);
inline CalendarFeatures calendar_onehots(DayIndex day) {
    return calendar_onehots(civil_from_days(day));
}

/// Recovers the three active indices from a 90-slot encoding; throws
/// ShapeError if the vector is not a well-formed calendar one-hot.
CalendarFeatures decode_calendar(const std::vector<double>& onehot);

} // namespace loadcast
