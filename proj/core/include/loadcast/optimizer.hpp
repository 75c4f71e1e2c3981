#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "loadcast/graph.hpp"
#include "loadcast/tensor.hpp"

namespace loadcast {

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double grad_norm_cap = 0.0; // 0 disables global-norm clipping
};

/// Named model parameters with their Adam moments. One store per model
/// instance; the step counter is shared by all parameters updated in a
/// single optimizer step.
class ParameterStore {
public:
    struct Entry {
        Tensor value;
        Tensor m;
        Tensor v;
    };

    Tensor& create(const std::string& name, Tensor init);
    bool has(const std::string& name) const { return entries_.count(name) != 0; }
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;

    /// Registers the stored tensor on a graph as a trainable leaf.
    Var use(Graph& g, const std::string& name) const { return g.param(name, get(name)); }

    std::int64_t step_count() const { return step_; }
    std::size_t size() const { return entries_.size(); }

    // Ordered (alphabetical) iteration; keeps serialization and update
    // order deterministic.
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }

    /// Standard Adam update with bias correction over the supplied
    /// gradients. Parameters absent from the map are left untouched.
    void adam_step(const GradientMap& grads, double lr,
                   const AdamSettings& settings = {});

private:
    std::map<std::string, Entry> entries_;
    std::int64_t step_ = 0;
};

/// Uniform init in [-a, a] with a = 1/sqrt(fan_in); biases use zeros.
Tensor uniform_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng);

} // namespace loadcast
