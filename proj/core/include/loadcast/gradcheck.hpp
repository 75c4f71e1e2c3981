#pragma once

#include <functional>
#include <memory>
#include <string>

#include "loadcast/optimizer.hpp"

namespace loadcast {

struct GradCheckOptions {
    double eps = 1e-5;
    /// 0 checks every component. For large models exhaustive central
    /// differences are prohibitively slow; a positive cap samples that many
    /// components per tensor (deterministically, from `seed`) so every
    /// parameter tensor still gets probed.
    std::size_t max_components_per_tensor = 0;
    std::uint64_t seed = 1;
    /// Test hook: perturbs one analytic gradient so the check must fail.
    bool corrupt = false;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    std::size_t components_checked = 0;
};

/// A rebuilt evaluation of the scalar loss from the store's current values.
/// The builder owns the graph so recurrent machinery can construct it however
/// it likes.
struct LossEval {
    std::shared_ptr<Graph> graph;
    Var loss;
};

using LossBuilder = std::function<LossEval()>;

/// Compares analytic gradients against central finite differences,
/// component by component. Returns the max over checked components of
///   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
/// The builder must evaluate from `params`' current values; those values are
/// perturbed in place between evaluations.
GradCheckReport gradient_check(const LossBuilder& build, ParameterStore& params,
                               const GradCheckOptions& opts = {});

} // namespace loadcast
