#include "loadcast/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace loadcast {

namespace {

double evaluate(const LossBuilder& build) {
    LossEval e = build();
    const double v = e.graph->scalar(e.loss);
    if (!std::isfinite(v)) {
        throw DomainError("gradient_check: non-finite loss evaluation");
    }
    return v;
}

} // namespace

GradCheckReport gradient_check(const LossBuilder& build, ParameterStore& params,
                               const GradCheckOptions& opts) {
    if (!(opts.eps > 0.0)) {
        throw std::invalid_argument("gradient_check: eps must be positive");
    }

    GradientMap analytic;
    {
        LossEval e = build();
        if (!std::isfinite(e.graph->scalar(e.loss))) {
            throw DomainError("gradient_check: non-finite loss evaluation");
        }
        e.graph->backward(e.loss);
        analytic = e.graph->gradients();
    }
    if (opts.corrupt && !analytic.empty()) {
        for (auto& v : analytic.begin()->second.values()) v += 0.1;
    }

    std::mt19937_64 rng(opts.seed);
    GradCheckReport report;

    for (auto& [name, grad] : analytic) {
        Tensor& value = params.get(name);
        const std::size_t n = value.size();

        std::vector<std::size_t> indices(n);
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        if (opts.max_components_per_tensor != 0 && n > opts.max_components_per_tensor) {
            std::shuffle(indices.begin(), indices.end(), rng);
            indices.resize(opts.max_components_per_tensor);
            std::sort(indices.begin(), indices.end());
        }

        for (std::size_t idx : indices) {
            const double saved = value[idx];
            value[idx] = saved + opts.eps;
            const double fp = evaluate(build);
            value[idx] = saved - opts.eps;
            const double fm = evaluate(build);
            value[idx] = saved;

            const double numeric = (fp - fm) / (2.0 * opts.eps);
            const double a = grad[idx];
            const double rel = std::abs(a - numeric) /
                               std::max(1e-8, std::abs(a) + std::abs(numeric));
            ++report.components_checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_param = name;
                report.worst_index = idx;
                report.analytic_at_worst = a;
                report.numeric_at_worst = numeric;
            }
        }
    }
    return report;
}

} // namespace loadcast
