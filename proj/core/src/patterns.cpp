#include "loadcast/patterns.hpp"

#include <cmath>

namespace loadcast {

InputPattern make_input(Graph& g, std::span<const double> window,
                        const EsWindow& es, const CalendarFeatures& calendar,
                        std::optional<Var> context_mod) {
    if (window.size() != kInputWindowHours) {
        throw ShapeError("make_input: window of " + std::to_string(window.size()) +
                         " hours, expected 168");
    }
    double zbar = 0.0;
    for (double z : window) {
        if (!(z > 0.0)) {
            throw DomainError("make_input: non-positive load in the input window");
        }
        zbar += z;
    }
    zbar /= static_cast<double>(window.size());

    // log(z / (zbar * s)) = log(z / zbar) - log(s); the data part is constant.
    std::vector<double> logz(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        logz[i] = std::log(window[i] / zbar);
    }
    const std::int64_t in_start = es.cursor() - kInputWindowHours;
    std::vector<Var> s_in = es.seasonal_range(in_start, kInputWindowHours);

    InputPattern p;
    p.zbar = zbar;
    p.x_in = g.constant_vec(std::move(logz)) - loadcast::log(g.concat(s_in));
    p.s_out = es.predict_seasonals(kOutputWindowHours);
    p.s_hat_minus_1 = g.concat(p.s_out) - 1.0;
    p.log10_mean = g.constant(std::log10(zbar));
    p.calendar = calendar;
    p.context_mod = context_mod;
    return p;
}

OutputPattern make_output(std::span<const double> target, double zbar) {
    if (target.size() != kOutputWindowHours) {
        throw ShapeError("make_output: target of " + std::to_string(target.size()) +
                         " hours, expected 24");
    }
    if (!(zbar > 0.0)) {
        throw DomainError("make_output: non-positive window mean");
    }
    Tensor t(Shape::vec(kOutputWindowHours));
    for (std::size_t i = 0; i < target.size(); ++i) {
        t[i] = target[i] / zbar;
    }
    return OutputPattern{std::move(t)};
}

std::array<double, 24> postprocess_vector(std::span<const double> x_hat, double zbar,
                                          std::span<const double> s_hat) {
    if (x_hat.size() != 24 || s_hat.size() != 24) {
        throw ShapeError("postprocess: expected 24-hour vectors");
    }
    std::array<double, 24> out{};
    for (std::size_t i = 0; i < 24; ++i) {
        out[i] = std::exp(x_hat[i]) * zbar * s_hat[i];
    }
    return out;
}

ForecastBundle postprocess(std::span<const double> x_point, std::span<const double> x_lower,
                           std::span<const double> x_upper, double zbar,
                           std::span<const double> s_hat) {
    ForecastBundle b;
    b.point = postprocess_vector(x_point, zbar, s_hat);
    b.lower = postprocess_vector(x_lower, zbar, s_hat);
    b.upper = postprocess_vector(x_upper, zbar, s_hat);
    return b;
}

Var loss_space(Var x_hat_rnn, std::span<const Var> s_out) {
    Graph& g = *x_hat_rnn.graph;
    return loadcast::exp(x_hat_rnn) * g.concat(s_out);
}

} // namespace loadcast
