#include "loadcast/network.hpp"

namespace loadcast {

void NetworkConfig::validate() const {
    if (control_size > state_size) {
        throw ShapeError("network: control size " + std::to_string(control_size) +
                         " exceeds state size " + std::to_string(state_size));
    }
    if (dilations.empty()) {
        throw ShapeError("network: no layers configured");
    }
    for (int d : dilations) {
        if (d < 1) throw ShapeError("network: dilation must be positive");
    }
    if (feature_len == 0 || head_width == 0 || embed_dim == 0 || state_size == 0 ||
        control_size == 0) {
        throw ShapeError("network: zero-sized dimension in config");
    }
}

void create_network_params(ParameterStore& store, const std::string& prefix,
                           const NetworkConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    for (std::size_t l = 0; l < cfg.layers(); ++l) {
        const std::string lp = prefix + "/l" + std::to_string(l + 1);
        if (cfg.attention) {
            create_cell_params(store, lp + "/att", cfg.bottom_shape(l), rng);
        }
        create_cell_params(store, lp + "/cell", cfg.upper_shape(l), rng);
    }
    store.create(prefix + "/embed/W",
                 uniform_init(Shape::mat(cfg.embed_dim, kCalendarSlots), kCalendarSlots, rng));
    store.create(prefix + "/head/W",
                 uniform_init(Shape::mat(cfg.head_width, cfg.state_size), cfg.state_size, rng));
    store.create(prefix + "/head/b", Tensor::zeros(Shape::vec(cfg.head_width)));
}

NetworkWeights bind_network(Graph& g, const ParameterStore& store,
                            const std::string& prefix, const NetworkConfig& cfg) {
    NetworkWeights w;
    w.layers.resize(cfg.layers());
    for (std::size_t l = 0; l < cfg.layers(); ++l) {
        const std::string lp = prefix + "/l" + std::to_string(l + 1);
        if (cfg.attention) {
            w.layers[l].bottom = bind_cell(g, store, lp + "/att", cfg.bottom_shape(l));
        }
        w.layers[l].upper = bind_cell(g, store, lp + "/cell", cfg.upper_shape(l));
    }
    w.embed = store.use(g, prefix + "/embed/W");
    w.head_w = store.use(g, prefix + "/head/W");
    w.head_b = store.use(g, prefix + "/head/b");
    return w;
}

NetworkHistory::NetworkHistory(Graph& g, const NetworkConfig& cfg) {
    layers.resize(cfg.layers());
    for (std::size_t l = 0; l < cfg.layers(); ++l) {
        if (cfg.attention) {
            layers[l].bottom = CellHistory(g, cfg.bottom_shape(l), cfg.dilations[l]);
        }
        layers[l].upper = CellHistory(g, cfg.upper_shape(l), cfg.dilations[l]);
    }
}

void NetworkHistory::detach_to(Graph& g, int keep) {
    for (auto& l : layers) {
        if (l.bottom.valid()) l.bottom.detach_to(g, keep);
        l.upper.detach_to(g, keep);
    }
}

void NetworkHistory::push_zero_step() {
    for (auto& l : layers) {
        if (l.bottom.valid()) l.bottom.push_zero();
        l.upper.push_zero();
    }
}

Var embed_calendar(Graph& g, Var embed_weights, const CalendarFeatures& calendar) {
    return matvec(embed_weights, g.constant_vec(calendar.onehot()));
}

Var assemble_features(Graph& g, const NetworkWeights& w, const InputPattern& pattern) {
    std::vector<Var> parts;
    parts.reserve(5);
    parts.push_back(pattern.x_in);
    parts.push_back(pattern.s_hat_minus_1);
    parts.push_back(pattern.log10_mean);
    parts.push_back(embed_calendar(g, w.embed, pattern.calendar));
    if (pattern.context_mod) {
        parts.push_back(*pattern.context_mod);
    }
    return g.concat(parts);
}

Var network_step(Graph& g, const NetworkWeights& w, const NetworkConfig& cfg,
                 Var features, NetworkHistory& history) {
    if (g.value(features).size() != cfg.feature_len) {
        throw ShapeError("network_step: features of length " +
                         std::to_string(g.value(features).size()) + ", config expects " +
                         std::to_string(cfg.feature_len));
    }
    Var out;
    for (std::size_t l = 0; l < cfg.layers(); ++l) {
        Var x = l == 0 ? features
                       : (cfg.inject_input ? g.concat({out, features}) : out);
        AttentiveStep step = adrnn_cell_step(w.layers[l].bottom, w.layers[l].upper, x,
                                             history.layers[l].bottom,
                                             history.layers[l].upper, cfg.attention);
        // ResNet-style shortcut above the first layer.
        out = l == 0 ? step.y : step.y + out;
    }
    return out;
}

MainHeadOutput head_main(Graph& g, const NetworkWeights& w, Var network_out) {
    Var o = matvec(w.head_w, network_out) + w.head_b;
    if (g.value(o).size() != kMainHeadWidth) {
        throw ShapeError("head_main: head width " + std::to_string(g.value(o).size()) +
                         ", expected " + std::to_string(kMainHeadWidth));
    }
    MainHeadOutput out;
    out.point = slice(o, 0, 24);
    out.lower = slice(o, 24, 24);
    out.upper = slice(o, 48, 24);
    out.dalpha = slice(o, 72, 1);
    out.dbeta = slice(o, 73, 1);
    return out;
}

ContextHeadOutput head_context(Graph& g, const NetworkWeights& w, Var network_out,
                               std::size_t context_size) {
    Var o = matvec(w.head_w, network_out) + w.head_b;
    if (g.value(o).size() != context_size + 2) {
        throw ShapeError("head_context: head width " + std::to_string(g.value(o).size()) +
                         ", expected " + std::to_string(context_size + 2));
    }
    ContextHeadOutput out;
    out.r = slice(o, 0, context_size);
    out.dalpha = slice(o, context_size, 1);
    out.dbeta = slice(o, context_size + 1, 1);
    return out;
}

} // namespace loadcast
