#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "loadcast/stats.hpp"

using namespace loadcast;

namespace {

std::vector<double> sinusoid(std::size_t n, double period, double amp, double offset,
                             double phase = 0.0) {
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) {
        z[t] = offset + amp * std::sin(2.0 * std::numbers::pi * t / period + phase);
    }
    return z;
}

HourlyLoadSeries series_of(std::string id, HourIndex start, std::vector<double> v,
                           std::vector<std::uint8_t> missing = {}) {
    HourlyLoadSeries s;
    s.id = std::move(id);
    s.start = start;
    if (missing.empty()) missing.assign(v.size(), 0);
    s.missing = std::move(missing);
    s.values = std::move(v);
    return s;
}

} // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("pure daily sinusoid carries all variance") {
    const auto z = sinusoid(24 * 364, 24.0, 5.0, 100.0);
    CHECK(h_ratio(z, 24) == doctest::Approx(100.0).epsilon(0.01));
}

TEST_CASE("white noise has near-zero h-ratio") {
    // Simulation oracle over 20 seeds at one-year length.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(100.0, 3.0);
        std::vector<double> z(8760);
        for (auto& v : z) v = g(rng);
        CHECK(h_ratio(z, 24) < 5.0);
    }
}

TEST_CASE("two equal harmonics split the variance evenly") {
    const std::size_t n = 168 * 52;
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) {
        z[t] = 50.0 + 2.0 * std::sin(2.0 * std::numbers::pi * t / 24.0) +
               2.0 * std::sin(2.0 * std::numbers::pi * t / 168.0);
    }
    CHECK(h_ratio(z, 24) == doctest::Approx(50.0).epsilon(0.02));
    CHECK(h_ratio(z, 168) == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("h-ratio invariances") {
    const auto base = sinusoid(24 * 200, 24.0, 4.0, 80.0, 0.7);
    const double h = h_ratio(base, 24);
    auto shifted = base;
    for (auto& v : shifted) v += 55.5;
    auto scaled = base;
    for (auto& v : scaled) v *= 3.25;
    CHECK(std::abs(h_ratio(shifted, 24) - h) <= 1e-6 * h);
    CHECK(std::abs(h_ratio(scaled, 24) - h) <= 1e-6 * h);
}

TEST_CASE("h-ratio domain errors") {
    const auto z = sinusoid(100, 24.0, 1.0, 10.0);
    CHECK_THROWS_AS(h_ratio(z, 168), DataError);   // span shorter than one period
    CHECK_THROWS_AS(h_ratio(z, 48), DataError);    // unsupported period
    const auto s = series_of("XX", 0, sinusoid(400, 24.0, 1.0, 10.0),
                             std::vector<std::uint8_t>(400, 0));
    CHECK_THROWS_AS(h_ratio(s, 24, 0, 500), DataError); // span outside series
}

TEST_CASE("summary stats") {
    SUBCASE("constant series has zero dispersion") {
        const auto s = series_of("XX", 0, std::vector<double>(24 * 7, 42.0));
        const SummaryStats st = summary_stats(s);
        CHECK(st.mean_demand == 42.0);
        CHECK(st.mean_daily_std == 0.0);
    }
    SUBCASE("two identical days match the one-day deviation") {
        std::vector<double> day(24);
        for (int h = 0; h < 24; ++h) day[static_cast<std::size_t>(h)] = 100.0 + h;
        std::vector<double> two = day;
        two.insert(two.end(), day.begin(), day.end());
        const double one_day = summary_stats(series_of("XX", 0, day)).mean_daily_std;
        const double two_days = summary_stats(series_of("XX", 0, two)).mean_daily_std;
        CHECK(two_days == doctest::Approx(one_day).epsilon(1e-12));
    }
    SUBCASE("mean skips missing hours") {
        auto s = series_of("XX", 0, {10, 0, 20}, {0, 1, 0});
        CHECK(summary_stats(s).mean_demand == 15.0);
    }
    SUBCASE("all-missing series rejected") {
        auto s = series_of("XX", 0, {0, 0}, {1, 1});
        CHECK_THROWS_AS(summary_stats(s), DataError);
    }
}

TEST_CASE("context set selection") {
    std::vector<HourlyLoadSeries> all;
    all.push_back(series_of("CC", 0, std::vector<double>(100, 1.0)));
    all.push_back(series_of("AA", 0, std::vector<double>(100, 1.0)));
    auto gappy = series_of("BB", 0, std::vector<double>(100, 1.0));
    gappy.missing[50] = 1;
    all.push_back(gappy);

    SUBCASE("complete series only, alphabetical") {
        const auto ids = context_set(all, 0, 100);
        CHECK(ids == std::vector<std::string>{"AA", "CC"});
    }
    SUBCASE("gap outside the span does not disqualify") {
        const auto ids = context_set(all, 0, 50);
        CHECK(ids == std::vector<std::string>{"AA", "BB", "CC"});
    }
    SUBCASE("single complete series") {
        std::vector<HourlyLoadSeries> one;
        one.push_back(series_of("ZZ", 0, std::vector<double>(10, 1.0)));
        CHECK(context_set(one, 0, 10) == std::vector<std::string>{"ZZ"});
    }
    SUBCASE("empty result rejected") {
        std::vector<HourlyLoadSeries> none;
        none.push_back(gappy);
        CHECK_THROWS_AS(context_set(none, 0, 100), DataError);
    }
}

TEST_SUITE_END();
