#include "loadcast/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace loadcast {

std::vector<std::string> synth_ids(int num_series) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(num_series));
    for (int i = 1; i <= num_series; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%02d", i);
        ids.emplace_back(buf);
    }
    return ids;
}

std::vector<HourlyLoadSeries> synth_dataset(const SynthOptions& opts) {
    if (opts.num_series < 1 || opts.days < 1) {
        throw DataError("synth_dataset: need at least one series and one day");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const std::size_t hours = static_cast<std::size_t>(opts.days) * 24;
    const HourIndex start = hour_index(opts.start, 0);
    const DayIndex start_day = days_from_civil(opts.start);

    // Shared day-level AR(1) shock in log space.
    std::vector<double> shock(static_cast<std::size_t>(opts.days), 0.0);
    if (opts.shared_shock_sigma > 0.0) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> noise(0.0, opts.shared_shock_sigma);
        double f = 0.0;
        for (auto& s : shock) {
            f = opts.shock_rho * f + noise(rng);
            s = f;
        }
    }

    const std::vector<std::string> ids = synth_ids(opts.num_series);
    std::vector<HourlyLoadSeries> out;
    out.reserve(ids.size());
    for (int i = 0; i < opts.num_series; ++i) {
        std::mt19937_64 rng(opts.seed * 6364136223846793005ULL +
                            static_cast<std::uint64_t>(i) + 1);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        const double base = 200.0 * std::pow(25.0, uni(rng)); // 200..5000 MWh
        const double a1 = 0.10 + 0.20 * uni(rng);
        const double a2 = 0.05 + 0.10 * uni(rng);
        const double ph1 = two_pi * uni(rng);
        const double ph2 = two_pi * uni(rng);
        const double phy = two_pi * uni(rng);
        const double sat = 0.80 + 0.10 * uni(rng);
        const double sun = 0.75 + 0.10 * uni(rng);

        HourlyLoadSeries s;
        s.id = ids[static_cast<std::size_t>(i)];
        s.start = start;
        s.values.resize(hours);
        s.missing.assign(hours, 0);
        for (std::size_t t = 0; t < hours; ++t) {
            const DayIndex day = start_day + static_cast<DayIndex>(t / 24);
            const int hour = static_cast<int>(t % 24);
            const int dow = iso_weekday(civil_from_days(day));
            const int doy = day_of_year(civil_from_days(day));

            const double daily = 1.0 + a1 * std::sin(two_pi * hour / 24.0 + ph1) +
                                 a2 * std::sin(2.0 * two_pi * hour / 24.0 + ph2);
            const double weekly = dow == 6 ? sat : (dow == 7 ? sun : 1.0);
            const double yearly =
                1.0 + opts.yearly_amplitude * std::sin(two_pi * doy / 365.25 + phy);
            const double f = shock[static_cast<std::size_t>(t / 24)];
            const double eps = std::exp(opts.noise * gauss(rng));
            s.values[t] = base * daily * weekly * yearly * std::exp(f) * eps;
        }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace loadcast
