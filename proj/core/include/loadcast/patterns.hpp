#pragma once

#include <optional>
#include <span>

#include "loadcast/calendar.hpp"
#include "loadcast/es.hpp"
#include "loadcast/graph.hpp"

namespace loadcast {

inline constexpr int kInputWindowHours = 168;
inline constexpr int kOutputWindowHours = 24;

/// Preprocessed weekly input window plus the enrichment features: predicted
/// daily seasonals (reduced by 1), the log10 level, calendar one-hots and,
/// for the main track, the modulated context vector.
struct InputPattern {
    Var x_in;                      // 168: log(z / (zbar * s_hat))
    Var s_hat_minus_1;             // 24
    Var log10_mean;                // 1 (constant feature)
    CalendarFeatures calendar;
    std::optional<Var> context_mod; // u*K, main track only
    double zbar = 0.0;             // window mean, in MWh
    std::vector<Var> s_out;        // the 24 seasonal indices for the output window
};

/// Normalized target for one forecast day: z / zbar.
struct OutputPattern {
    Tensor x_out; // 24
};

/// Point forecast and PI bounds in MWh for one day.
struct ForecastBundle {
    std::string series_id;
    DayIndex day = 0;
    std::array<double, 24> point{};
    std::array<double, 24> lower{};
    std::array<double, 24> upper{};
};

/// Builds the input pattern for the window of 168 hours ending at the ES
/// cursor. The window must be complete and positive; zbar is its mean.
InputPattern make_input(Graph& g, std::span<const double> window,
                        const EsWindow& es, const CalendarFeatures& calendar,
                        std::optional<Var> context_mod);

OutputPattern make_output(std::span<const double> target, double zbar);

/// Real-unit conversion of one head vector: z_hat = exp(x_hat) * zbar * s_hat.
std::array<double, 24> postprocess_vector(std::span<const double> x_hat, double zbar,
                                          std::span<const double> s_hat);

ForecastBundle postprocess(std::span<const double> x_point, std::span<const double> x_lower,
                           std::span<const double> x_upper, double zbar,
                           std::span<const double> s_hat);

/// Loss-space forecast: exp(x_hat) * s_hat, i.e. z_hat / zbar.
Var loss_space(Var x_hat_rnn, std::span<const Var> s_out);

} // namespace loadcast
