#pragma once

#include "loadcast/cell.hpp"
#include "loadcast/patterns.hpp"

namespace loadcast {

inline constexpr std::size_t kMainHeadWidth = 3 * kOutputWindowHours + 2; // 74

/// Static shape of one track's recurrent stack.
struct NetworkConfig {
    std::size_t state_size = 150;   // s_c
    std::size_t control_size = 70;  // s_h
    std::size_t embed_dim = 10;
    std::vector<int> dilations = {2, 4, 7};
    std::size_t feature_len = 0;    // assembled input pattern length
    std::size_t head_width = kMainHeadWidth;
    bool attention = true;
    bool inject_input = true;

    std::size_t layers() const { return dilations.size(); }
    std::size_t layer_input(std::size_t layer) const {
        if (layer == 0) return feature_len;
        return inject_input ? state_size + feature_len : state_size;
    }
    CellShape bottom_shape(std::size_t layer) const {
        const std::size_t in = layer_input(layer);
        return CellShape{in, in, std::min(control_size, in)};
    }
    CellShape upper_shape(std::size_t layer) const {
        return CellShape{layer_input(layer), state_size, control_size};
    }
    void validate() const;
};

void create_network_params(ParameterStore& store, const std::string& prefix,
                           const NetworkConfig& cfg, std::mt19937_64& rng);

struct NetworkWeights {
    struct Layer {
        CellWeights bottom; // unused when attention is off
        CellWeights upper;
    };
    std::vector<Layer> layers;
    Var embed;  // embed_dim x 90
    Var head_w; // head_width x s_c
    Var head_b; // head_width
};

NetworkWeights bind_network(Graph& g, const ParameterStore& store,
                            const std::string& prefix, const NetworkConfig& cfg);

/// Recurrent state of one series under one network.
struct NetworkHistory {
    struct Layer {
        CellHistory bottom;
        CellHistory upper;
    };
    std::vector<Layer> layers;

    NetworkHistory() = default;
    NetworkHistory(Graph& g, const NetworkConfig& cfg);
    void detach_to(Graph& g, int keep);
    void push_zero_step();
};

/// Linear 90 -> embed_dim map of the calendar one-hots (no bias).
Var embed_calendar(Graph& g, Var embed_weights, const CalendarFeatures& calendar);

/// Concatenates [x_in, s_hat-1, log10 zbar, calendar embedding, context].
Var assemble_features(Graph& g, const NetworkWeights& w, const InputPattern& pattern);

/// Steps the full stack: layer 1 sees the assembled features; upper layers
/// see the previous output (optionally re-extended with the features) and add
/// their output on top of it (residual shortcuts). Returns the final state.
Var network_step(Graph& g, const NetworkWeights& w, const NetworkConfig& cfg,
                 Var features, NetworkHistory& history);

struct MainHeadOutput {
    Var point;  // 24
    Var lower;  // 24
    Var upper;  // 24
    Var dalpha; // 1
    Var dbeta;  // 1
};

struct ContextHeadOutput {
    Var r;      // u
    Var dalpha; // 1
    Var dbeta;  // 1
};

MainHeadOutput head_main(Graph& g, const NetworkWeights& w, Var network_out);
ContextHeadOutput head_context(Graph& g, const NetworkWeights& w, Var network_out,
                               std::size_t context_size);

} // namespace loadcast
