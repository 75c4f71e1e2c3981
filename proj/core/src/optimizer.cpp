#include "loadcast/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace loadcast {

Tensor& ParameterStore::create(const std::string& name, Tensor init) {
    auto [it, inserted] = entries_.try_emplace(name);
    if (!inserted) {
        throw std::logic_error("parameter '" + name + "' already exists");
    }
    it->second.m = Tensor::zeros(init.shape());
    it->second.v = Tensor::zeros(init.shape());
    it->second.value = std::move(init);
    return it->second.value;
}

Tensor& ParameterStore::get(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw std::out_of_range("no parameter named '" + name + "'");
    }
    return it->second.value;
}

const Tensor& ParameterStore::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw std::out_of_range("no parameter named '" + name + "'");
    }
    return it->second.value;
}

void ParameterStore::adam_step(const GradientMap& grads, double lr,
                               const AdamSettings& s) {
    if (!(lr > 0.0)) {
        throw std::invalid_argument("adam_step: learning rate must be positive");
    }
    double scale = 1.0;
    if (s.grad_norm_cap > 0.0) {
        double sq = 0.0;
        for (const auto& [name, g] : grads) {
            for (double v : g.values()) sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm > s.grad_norm_cap) scale = s.grad_norm_cap / norm;
    }

    ++step_;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(step_));

    for (const auto& [name, g] : grads) {
        auto it = entries_.find(name);
        if (it == entries_.end()) {
            throw std::out_of_range("adam_step: gradient for unknown parameter '" + name + "'");
        }
        Entry& e = it->second;
        if (g.shape() != e.value.shape()) {
            throw ShapeError("adam_step: gradient shape " + g.shape().str() +
                             " does not match parameter '" + name + "' of shape " +
                             e.value.shape().str());
        }
        const std::size_t n = e.value.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double gi = g[i] * scale;
            e.m[i] = s.beta1 * e.m[i] + (1.0 - s.beta1) * gi;
            e.v[i] = s.beta2 * e.v[i] + (1.0 - s.beta2) * gi * gi;
            const double mhat = e.m[i] / bc1;
            const double vhat = e.v[i] / bc2;
            e.value[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
        }
    }
}

Tensor uniform_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-a, a);
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
    return t;
}

} // namespace loadcast
