#pragma once

#include "loadcast/series.hpp"

namespace loadcast {

/// Synthetic hourly demand with daily, weekly and yearly multiplicative
/// structure, used by self-checks and scaled experiments. Optionally all
/// series share a persistent day-level shock, which gives the context track
/// genuine cross-series information.
struct SynthOptions {
    int num_series = 8;
    CivilDate start{2016, 1, 1};
    int days = 731;
    double noise = 0.02;             // lognormal sigma of the hourly noise
    double shared_shock_sigma = 0.0; // day-level AR(1) shock, shared
    double shock_rho = 0.7;
    double yearly_amplitude = 0.10;
    std::uint64_t seed = 42;
};

std::vector<HourlyLoadSeries> synth_dataset(const SynthOptions& opts);

/// Ids "S01".."Snn" in generation order (already alphabetical).
std::vector<std::string> synth_ids(int num_series);

} // namespace loadcast
