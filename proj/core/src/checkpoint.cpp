#include "loadcast/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace loadcast {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'F', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::istream& in, const std::string& origin) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw DataError(origin + ": truncated checkpoint");
    }
    return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& origin) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw DataError(origin + ": truncated checkpoint");
    }
    return v;
}

nlohmann::json config_json(const ModelConfig& c) {
    return {
        {"state_size", c.state_size},
        {"control_size", c.control_size},
        {"embed_dim", c.embed_dim},
        {"dilations", c.dilations},
        {"context_size", c.context_size},
        {"q_center", c.loss.q_center},
        {"q_lower", c.loss.q_lower},
        {"q_upper", c.loss.q_upper},
        {"gamma", c.loss.gamma},
        {"attention", c.attention},
        {"inject_input", c.inject_input},
        {"use_context", c.use_context},
        {"adapt_modulation", c.adapt_modulation},
    };
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.state_size = j.at("state_size").get<std::size_t>();
    c.control_size = j.at("control_size").get<std::size_t>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.dilations = j.at("dilations").get<std::vector<int>>();
    c.context_size = j.at("context_size").get<std::size_t>();
    c.loss.q_center = j.at("q_center").get<double>();
    c.loss.q_lower = j.at("q_lower").get<double>();
    c.loss.q_upper = j.at("q_upper").get<double>();
    c.loss.gamma = j.at("gamma").get<double>();
    c.attention = j.at("attention").get<bool>();
    c.inject_input = j.at("inject_input").get<bool>();
    c.use_context = j.at("use_context").get<bool>();
    c.adapt_modulation = j.at("adapt_modulation").get<bool>();
    return c;
}

} // namespace

void save_checkpoint(const Model& model, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);

    nlohmann::json header;
    header["config"] = config_json(model.cfg);
    header["context_ids"] = model.context_ids;
    header["seed"] = model.seed;
    header["adam_steps"] = model.params.step_count();
    const std::string blob = header.dump();
    put_u64(out, blob.size());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));

    put_u64(out, model.params.size());
    for (const auto& [name, entry] : model.params) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        const Shape& sh = entry.value.shape();
        put_u32(out, sh.rank);
        put_u32(out, sh.dim[0]);
        put_u32(out, sh.dim[1]);
        out.write(reinterpret_cast<const char*>(entry.value.data()),
                  static_cast<std::streamsize>(entry.value.size() * sizeof(double)));
    }
}

void save_checkpoint(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write checkpoint '" + path + "'");
    }
    save_checkpoint(model, out);
    if (!out) {
        throw DataError("failed writing checkpoint '" + path + "'");
    }
}

Model load_checkpoint(std::istream& in, const std::string& origin) {
    char magic[4];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError(origin + ": not a checkpoint file");
    }
    const std::uint32_t version = get_u32(in, origin);
    if (version != kVersion) {
        throw DataError(origin + ": unsupported checkpoint version " +
                        std::to_string(version));
    }
    const std::uint64_t blob_len = get_u64(in, origin);
    std::string blob(blob_len, '\0');
    if (!in.read(blob.data(), static_cast<std::streamsize>(blob_len))) {
        throw DataError(origin + ": truncated checkpoint header");
    }
    nlohmann::json header = nlohmann::json::parse(blob, nullptr, false);
    if (header.is_discarded()) {
        throw DataError(origin + ": corrupt checkpoint header");
    }

    Model m;
    m.cfg = config_from_json(header.at("config"));
    m.context_ids = header.at("context_ids").get<std::vector<std::string>>();
    m.seed = header.at("seed").get<std::uint64_t>();

    const std::uint64_t count = get_u64(in, origin);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = get_u32(in, origin);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) {
            throw DataError(origin + ": truncated parameter name");
        }
        Shape sh;
        sh.rank = static_cast<std::uint8_t>(get_u32(in, origin));
        sh.dim[0] = get_u32(in, origin);
        sh.dim[1] = get_u32(in, origin);
        if (sh.rank < 1 || sh.rank > 2) {
            throw DataError(origin + ": bad tensor rank for '" + name + "'");
        }
        Tensor t(sh);
        if (!in.read(reinterpret_cast<char*>(t.data()),
                     static_cast<std::streamsize>(t.size() * sizeof(double)))) {
            throw DataError(origin + ": truncated tensor data for '" + name + "'");
        }
        m.params.create(name, std::move(t));
    }
    return m;
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open checkpoint '" + path + "'");
    }
    return load_checkpoint(in, path);
}

} // namespace loadcast
