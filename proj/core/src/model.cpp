#include "loadcast/model.hpp"

#include <algorithm>

#include "loadcast/es.hpp"

namespace loadcast {

int ModelConfig::max_dilation() const {
    return *std::max_element(dilations.begin(), dilations.end());
}

NetworkConfig Model::main_network() const {
    NetworkConfig n;
    n.state_size = cfg.state_size;
    n.control_size = cfg.control_size;
    n.embed_dim = cfg.embed_dim;
    n.dilations = cfg.dilations;
    n.feature_len = main_feature_len();
    n.head_width = kMainHeadWidth;
    n.attention = cfg.attention;
    n.inject_input = cfg.inject_input;
    return n;
}

NetworkConfig Model::context_network() const {
    NetworkConfig n;
    n.state_size = cfg.state_size;
    n.control_size = cfg.control_size;
    n.embed_dim = cfg.embed_dim;
    n.dilations = cfg.dilations;
    n.feature_len = cfg.base_feature_len();
    n.head_width = cfg.context_size + 2;
    n.attention = cfg.attention;
    n.inject_input = cfg.inject_input;
    return n;
}

Model Model::create(ModelConfig cfg, std::vector<std::string> context_ids,
                    std::uint64_t seed) {
    cfg.loss.validate();
    Model m;
    m.cfg = std::move(cfg);
    m.context_ids = std::move(context_ids);
    m.seed = seed;
    if (m.cfg.use_context && m.context_ids.empty()) {
        throw DataError("model: context track enabled but the context set is empty");
    }
    if (!m.cfg.use_context) {
        m.context_ids.clear();
    }

    std::mt19937_64 rng(seed);
    create_network_params(m.params, "net/main", m.main_network(), rng);
    if (m.cfg.use_context) {
        create_network_params(m.params, "net/ctx", m.context_network(), rng);
        for (const auto& id : m.context_ids) {
            const std::string p = context_series_prefix(id);
            m.params.create(p + "/ialpha", Tensor::scalar(kDefaultSmoothingLogit));
            m.params.create(p + "/ibeta", Tensor::scalar(kDefaultSmoothingLogit));
        }
    }
    return m;
}

void Model::ensure_main_series(const std::string& id) {
    const std::string p = main_series_prefix(id);
    if (params.has(p + "/ialpha")) return;
    params.create(p + "/ialpha", Tensor::scalar(kDefaultSmoothingLogit));
    params.create(p + "/ibeta", Tensor::scalar(kDefaultSmoothingLogit));
    if (cfg.use_context) {
        params.create(p + "/g", Tensor::full(Shape::vec(context_vector_len()), 1.0));
    }
}

bool Model::has_main_series(const std::string& id) const {
    return params.has(main_series_prefix(id) + "/ialpha");
}

} // namespace loadcast
