#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "loadcast/timeutil.hpp"

namespace loadcast {

/// Error in input data (unreadable files, malformed rows, empty selections).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// One country's hourly demand on a contiguous hourly grid. Gaps are kept
/// on the grid and flagged in `missing`.
struct HourlyLoadSeries {
    std::string id;           // country code
    HourIndex start = 0;      // UTC hour of values[0]
    std::vector<double> values;       // MWh; 0.0 placeholder where missing
    std::vector<std::uint8_t> missing; // 1 where no observation

    std::size_t size() const { return values.size(); }
    HourIndex end() const { return start + static_cast<HourIndex>(values.size()); }

    bool in_range(HourIndex h) const { return h >= start && h < end(); }
    bool is_missing(HourIndex h) const { return missing[static_cast<std::size_t>(h - start)]; }
    double at(HourIndex h) const { return values[static_cast<std::size_t>(h - start)]; }

    /// True when every hour of [from, from+n) is present.
    bool complete(HourIndex from, std::size_t n) const;
    std::size_t missing_count() const;
};

/// Parses the hourly load CSV (header `timestamp,country,load_mw`, timestamps
/// `YYYY-MM-DD HH:00` UTC, empty load field = missing). Returns one series per
/// country, alphabetically ordered, each normalized to a contiguous grid.
/// Duplicate (hour, country) rows are averaged; non-positive loads are treated
/// as missing observations.
std::vector<HourlyLoadSeries> load_csv(const std::string& path);
std::vector<HourlyLoadSeries> load_csv(std::istream& in, const std::string& origin);

void serialize_csv(const std::vector<HourlyLoadSeries>& series, std::ostream& out);
void serialize_csv(const std::vector<HourlyLoadSeries>& series, const std::string& path);

const HourlyLoadSeries* find_series(std::span<const HourlyLoadSeries> all,
                                    const std::string& id);

/// Restriction of a series to [from, to) intersected with its span.
HourlyLoadSeries slice_series(const HourlyLoadSeries& s, HourIndex from, HourIndex to);

} // namespace loadcast
