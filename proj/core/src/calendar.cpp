#include "loadcast/calendar.hpp"

#include <algorithm>

#include "loadcast/tensor.hpp"

namespace loadcast {

std::vector<double> CalendarFeatures::onehot() const {
    std::vector<double> v(kCalendarSlots, 0.0);
    v[static_cast<std::size_t>(day_of_week - 1)] = 1.0;
    v[static_cast<std::size_t>(kDayOfWeekSlots + day_of_month - 1)] = 1.0;
    v[static_cast<std::size_t>(kDayOfWeekSlots + kDayOfMonthSlots + week_of_year - 1)] = 1.0;
    return v;
}

CalendarFeatures calendar_onehots(const CivilDate& date) {
    CalendarFeatures f;
    f.day_of_week = iso_weekday(date);
    f.day_of_month = date.day;
    f.week_of_year = std::min(iso_week(date), kWeekOfYearSlots);
    return f;
}

CalendarFeatures decode_calendar(const std::vector<double>& onehot) {
    if (onehot.size() != kCalendarSlots) {
        throw ShapeError("calendar encoding has " + std::to_string(onehot.size()) +
                         " slots, expected " + std::to_string(kCalendarSlots));
    }
    CalendarFeatures f;
    int found = 0;
    for (int i = 0; i < kCalendarSlots; ++i) {
        if (onehot[static_cast<std::size_t>(i)] == 0.0) continue;
        if (onehot[static_cast<std::size_t>(i)] != 1.0) {
            throw ShapeError("calendar encoding has non-binary slot");
        }
        ++found;
        if (i < kDayOfWeekSlots) {
            f.day_of_week = i + 1;
        } else if (i < kDayOfWeekSlots + kDayOfMonthSlots) {
            f.day_of_month = i - kDayOfWeekSlots + 1;
        } else {
            f.week_of_year = i - kDayOfWeekSlots - kDayOfMonthSlots + 1;
        }
    }
    if (found != 3) {
        throw ShapeError("calendar encoding has " + std::to_string(found) +
                         " active slots, expected 3");
    }
    return f;
}

} // namespace loadcast
