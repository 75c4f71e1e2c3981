#pragma once

#include "loadcast/graph.hpp"

namespace loadcast {

/// Quantile orders and PI weight of the training loss. The centre quantile
/// sits slightly above the median to trim forecast bias; the outer pair
/// brackets the predictive interval.
struct LossSpec {
    double q_center = 0.525;
    double q_lower = 0.045;
    double q_upper = 0.975;
    double gamma = 0.3;

    void validate() const;
};

/// Pinball loss for one value: (x - xq) q when x >= xq, else (x - xq)(q - 1).
double pinball_value(double x, double x_hat_q, double q);

/// Mean over the 24 hours of the centre pinball plus gamma times the two
/// PI pinballs. `target` is the normalized actual (x_out); forecasts are in
/// loss space (exp(x_hat) * s_hat).
Var step_loss(Graph& g, const Tensor& target, Var center, Var lower, Var upper,
              const LossSpec& spec);

} // namespace loadcast
