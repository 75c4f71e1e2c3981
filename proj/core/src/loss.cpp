#include "loadcast/loss.hpp"

namespace loadcast {

void LossSpec::validate() const {
    if (!(0.0 < q_lower && q_lower < q_center && q_center < q_upper && q_upper < 1.0)) {
        throw DomainError("loss: quantiles must satisfy 0 < q_lower < q_center < q_upper < 1");
    }
    if (gamma < 0.0) {
        throw DomainError("loss: gamma must be non-negative");
    }
}

double pinball_value(double x, double x_hat_q, double q) {
    return x >= x_hat_q ? (x - x_hat_q) * q : (x - x_hat_q) * (q - 1.0);
}

Var step_loss(Graph& g, const Tensor& target, Var center, Var lower, Var upper,
              const LossSpec& spec) {
    spec.validate();
    Var x = g.constant(target);
    Var central = mean(pinball(x, center, spec.q_center));
    Var pi = mean(pinball(x, lower, spec.q_lower)) + mean(pinball(x, upper, spec.q_upper));
    return central + spec.gamma * pi;
}

} // namespace loadcast
