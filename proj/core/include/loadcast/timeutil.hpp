#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace loadcast {

/// Hours since 1970-01-01 00:00 UTC. All series bookkeeping runs on this.
using HourIndex = std::int64_t;
/// Days since 1970-01-01 (UTC). A day index d covers hours [24d, 24d+24).
using DayIndex = std::int64_t;

struct CivilDate {
    int year = 1970;
    int month = 1;
    int day = 1;

    bool operator==(const CivilDate&) const = default;
};

std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

inline HourIndex hour_index(const CivilDate& d, int hour) {
    return days_from_civil(d) * 24 + hour;
}
inline DayIndex day_of_hour(HourIndex h) {
    // Hour indices in this codebase are non-negative (post-1970 data).
    return h >= 0 ? h / 24 : (h - 23) / 24;
}
inline DayIndex day_index(const CivilDate& d) { return days_from_civil(d); }

/// ISO weekday, Monday=1 .. Sunday=7.
int iso_weekday(const CivilDate& d);
/// ISO-8601 week number, 1..53.
int iso_week(const CivilDate& d);
/// Day of year, 1..366.
int day_of_year(const CivilDate& d);

/// "YYYY-MM-DD HH:00" (UTC).
std::string format_timestamp(HourIndex h);
std::optional<HourIndex> parse_timestamp(std::string_view s);

/// "YYYY-MM-DD".
std::string format_date(const CivilDate& d);
std::string format_date(DayIndex day);
std::optional<CivilDate> parse_date(std::string_view s);

} // namespace loadcast
