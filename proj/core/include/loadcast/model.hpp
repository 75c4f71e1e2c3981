#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadcast/loss.hpp"
#include "loadcast/network.hpp"

namespace loadcast {

/// Hyperparameters of one forecaster instance (both tracks).
struct ModelConfig {
    std::size_t state_size = 150;   // s_c
    std::size_t control_size = 70;  // s_h
    std::size_t embed_dim = 10;
    std::vector<int> dilations = {2, 4, 7};
    std::size_t context_size = 3;   // u: context vector length per context series
    LossSpec loss;
    bool attention = true;        // attentive sub-cells
    bool inject_input = true;     // feed the features to layers 2 and 3 as well
    bool use_context = true;      // context track present
    bool adapt_modulation = true; // per-series modulation vectors are trained

    std::size_t base_feature_len() const {
        return kInputWindowHours + kOutputWindowHours + 1 + embed_dim;
    }
    int max_dilation() const;
};

/// One ensemble member: the two networks' weights plus per-series parameters,
/// all in a single store updated by the same optimizer.
struct Model {
    ModelConfig cfg;
    std::vector<std::string> context_ids; // fixed order, recorded in checkpoints
    std::uint64_t seed = 1;
    ParameterStore params;

    /// Creates both tracks' weights deterministically from the seed.
    static Model create(ModelConfig cfg, std::vector<std::string> context_ids,
                        std::uint64_t seed);

    std::size_t context_count() const {
        return cfg.use_context ? context_ids.size() : 0;
    }
    std::size_t context_vector_len() const {
        return cfg.context_size * context_count();
    }
    std::size_t main_feature_len() const {
        return cfg.base_feature_len() + context_vector_len();
    }

    NetworkConfig main_network() const;
    NetworkConfig context_network() const;

    static std::string main_series_prefix(const std::string& id) {
        return "series/main/" + id;
    }
    static std::string context_series_prefix(const std::string& id) {
        return "series/ctx/" + id;
    }

    /// Creates the per-series parameters (smoothing logits and, when the
    /// context track is on, the modulation vector) if absent.
    void ensure_main_series(const std::string& id);
    bool has_main_series(const std::string& id) const;
};

} // namespace loadcast
