#include "loadcast/timeutil.hpp"

#include <cstdio>

namespace loadcast {

// Civil-date conversions after Howard Hinnant's chrono-compatible algorithms.
std::int64_t days_from_civil(const CivilDate& d) {
    std::int64_t y = d.year;
    y -= d.month <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(d.day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                     static_cast<int>(d)};
}

int iso_weekday(const CivilDate& d) {
    // 1970-01-01 was a Thursday (ISO weekday 4).
    const std::int64_t days = days_from_civil(d);
    const std::int64_t wd = (days + 3) % 7; // 0 = Monday
    return static_cast<int>(wd >= 0 ? wd : wd + 7) + 1;
}

int day_of_year(const CivilDate& d) {
    return static_cast<int>(days_from_civil(d) -
                            days_from_civil(CivilDate{d.year, 1, 1})) + 1;
}

namespace {

int iso_weeks_in_year(int year) {
    auto p = [](int y) {
        return (y + y / 4 - y / 100 + y / 400) % 7;
    };
    return 52 + (p(year) == 4 || p(year - 1) == 3);
}

} // namespace

int iso_week(const CivilDate& d) {
    const int week = (day_of_year(d) - iso_weekday(d) + 10) / 7;
    if (week < 1) return iso_weeks_in_year(d.year - 1);
    if (week > iso_weeks_in_year(d.year)) return 1;
    return week;
}

std::string format_timestamp(HourIndex h) {
    const DayIndex day = day_of_hour(h);
    const CivilDate d = civil_from_days(day);
    const int hour = static_cast<int>(h - day * 24);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:00", d.year, d.month, d.day, hour);
    return buf;
}

std::string format_date(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string format_date(DayIndex day) { return format_date(civil_from_days(day)); }

namespace {

bool parse_uint(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const char c = pos + i < s.size() ? s[pos + i] : '\0';
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

bool valid_date(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1) return false;
    static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = len[m - 1];
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) dim = 29;
    return d <= dim;
}

} // namespace

std::optional<CivilDate> parse_date(std::string_view s) {
    int y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, m) || !parse_uint(s, 8, 2, d)) {
        return std::nullopt;
    }
    if (!valid_date(y, m, d)) return std::nullopt;
    return CivilDate{y, m, d};
}

std::optional<HourIndex> parse_timestamp(std::string_view s) {
    if (s.size() != 16 || s[10] != ' ' || s[13] != ':') return std::nullopt;
    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    int hh, mm;
    if (!parse_uint(s, 11, 2, hh) || !parse_uint(s, 14, 2, mm)) return std::nullopt;
    if (hh > 23 || mm != 0) return std::nullopt;
    return hour_index(*date, hh);
}

} // namespace loadcast
