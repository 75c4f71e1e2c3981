#include "loadcast/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace loadcast {

bool HourlyLoadSeries::complete(HourIndex from, std::size_t n) const {
    if (from < start || from + static_cast<HourIndex>(n) > end()) return false;
    const std::size_t off = static_cast<std::size_t>(from - start);
    for (std::size_t i = 0; i < n; ++i) {
        if (missing[off + i]) return false;
    }
    return true;
}

std::size_t HourlyLoadSeries::missing_count() const {
    std::size_t n = 0;
    for (auto m : missing) n += m;
    return n;
}

namespace {

struct RawObservation {
    HourIndex hour;
    double sum = 0.0;
    int count = 0; // 0 marks an explicit missing row
};

} // namespace

std::vector<HourlyLoadSeries> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return load_csv(in, path);
}

std::vector<HourlyLoadSeries> load_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(origin + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,country,load_mw") {
        throw DataError(origin + ": unexpected header '" + line + "'");
    }

    // country -> observations in file order; per-country timestamps must be
    // non-decreasing (equal allowed: DST duplicates get averaged).
    std::map<std::string, std::vector<RawObservation>> raw;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw DataError(origin + ": row " + std::to_string(row) + ": expected 3 fields");
        }
        const std::string_view ts(line.data(), c1);
        const std::string country = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string_view load(line.data() + c2 + 1, line.size() - c2 - 1);

        const auto hour = parse_timestamp(ts);
        if (!hour) {
            throw DataError(origin + ": row " + std::to_string(row) +
                            ": bad timestamp '" + std::string(ts) + "'");
        }
        if (country.empty()) {
            throw DataError(origin + ": row " + std::to_string(row) + ": empty country");
        }

        bool have_value = false;
        double value = 0.0;
        if (!load.empty()) {
            const char* first = load.data();
            const char* last = load.data() + load.size();
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
                throw DataError(origin + ": row " + std::to_string(row) +
                                ": bad load value '" + std::string(load) + "'");
            }
            // Loads are strictly positive; zeros and negatives carry no
            // usable demand information and are masked.
            have_value = value > 0.0;
        }

        auto& obs = raw[country];
        if (!obs.empty() && hour < obs.back().hour) {
            throw DataError(origin + ": row " + std::to_string(row) + ": timestamps for " +
                            country + " are not monotone");
        }
        if (!obs.empty() && obs.back().hour == *hour) {
            if (have_value) {
                obs.back().sum += value;
                obs.back().count += 1;
            }
        } else {
            RawObservation o;
            o.hour = *hour;
            if (have_value) {
                o.sum = value;
                o.count = 1;
            }
            obs.push_back(o);
        }
    }
    if (raw.empty()) {
        throw DataError(origin + ": no data rows");
    }

    std::vector<HourlyLoadSeries> out;
    out.reserve(raw.size());
    for (auto& [country, obs] : raw) {
        HourlyLoadSeries s;
        s.id = country;
        s.start = obs.front().hour;
        const std::size_t n = static_cast<std::size_t>(obs.back().hour - s.start) + 1;
        s.values.assign(n, 0.0);
        s.missing.assign(n, 1);
        for (const auto& o : obs) {
            const std::size_t i = static_cast<std::size_t>(o.hour - s.start);
            if (o.count > 0) {
                s.values[i] = o.sum / o.count;
                s.missing[i] = 0;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

void serialize_csv(const std::vector<HourlyLoadSeries>& series, std::ostream& out) {
    out << "timestamp,country,load_mw\n";
    char buf[32];
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << format_timestamp(s.start + static_cast<HourIndex>(i)) << ',' << s.id << ',';
            if (!s.missing[i]) {
                std::snprintf(buf, sizeof(buf), "%.17g", s.values[i]);
                out << buf;
            }
            out << '\n';
        }
    }
}

void serialize_csv(const std::vector<HourlyLoadSeries>& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    serialize_csv(series, out);
}

const HourlyLoadSeries* find_series(std::span<const HourlyLoadSeries> all,
                                    const std::string& id) {
    for (const auto& s : all) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

HourlyLoadSeries slice_series(const HourlyLoadSeries& s, HourIndex from, HourIndex to) {
    from = std::max(from, s.start);
    to = std::min(to, s.end());
    if (to <= from) {
        throw DataError("slice_series: empty result for " + s.id);
    }
    HourlyLoadSeries out;
    out.id = s.id;
    out.start = from;
    const std::size_t a = static_cast<std::size_t>(from - s.start);
    const std::size_t b = static_cast<std::size_t>(to - s.start);
    out.values.assign(s.values.begin() + a, s.values.begin() + b);
    out.missing.assign(s.missing.begin() + a, s.missing.begin() + b);
    return out;
}

} // namespace loadcast
