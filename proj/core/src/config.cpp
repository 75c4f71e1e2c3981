#include "loadcast/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace loadcast {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
    T out{};
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("config: bad value '" + v + "' for " + key);
    }
    return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean '" + v + "' for " + key);
}

CivilDate parse_date_or_throw(const std::string& v, const std::string& key) {
    auto d = parse_date(v);
    if (!d) throw ConfigError("config: bad date '" + v + "' for " + key + " (YYYY-MM-DD)");
    return *d;
}

std::string date_str(const std::optional<CivilDate>& d) {
    return d ? format_date(*d) : "";
}

} // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
    using Setter = std::function<void(RunConfig&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"data.path", [](RunConfig& c, const std::string& v) { c.data_path = v; }},
        {"split.train_start",
         [](RunConfig& c, const std::string& v) {
             c.train_start = v.empty() ? std::nullopt
                                       : std::optional(parse_date_or_throw(v, "split.train_start"));
         }},
        {"split.train_end",
         [](RunConfig& c, const std::string& v) {
             c.train_end = v.empty() ? std::nullopt
                                     : std::optional(parse_date_or_throw(v, "split.train_end"));
         }},
        {"split.val_start",
         [](RunConfig& c, const std::string& v) {
             c.val_start = v.empty() ? std::nullopt
                                     : std::optional(parse_date_or_throw(v, "split.val_start"));
         }},
        {"split.val_end",
         [](RunConfig& c, const std::string& v) {
             c.val_end = v.empty() ? std::nullopt
                                   : std::optional(parse_date_or_throw(v, "split.val_end"));
         }},
        {"split.test_start",
         [](RunConfig& c, const std::string& v) {
             c.test_start = v.empty() ? std::nullopt
                                      : std::optional(parse_date_or_throw(v, "split.test_start"));
         }},
        {"split.test_end",
         [](RunConfig& c, const std::string& v) {
             c.test_end = v.empty() ? std::nullopt
                                    : std::optional(parse_date_or_throw(v, "split.test_end"));
         }},
        {"model.state_size",
         [](RunConfig& c, const std::string& v) {
             c.state_size = parse_number<std::size_t>(v, "model.state_size");
         }},
        {"model.control_size",
         [](RunConfig& c, const std::string& v) {
             c.control_size = parse_number<std::size_t>(v, "model.control_size");
         }},
        {"model.embed_dim",
         [](RunConfig& c, const std::string& v) {
             c.embed_dim = parse_number<std::size_t>(v, "model.embed_dim");
         }},
        {"model.dilations",
         [](RunConfig& c, const std::string& v) {
             std::vector<int> d;
             for (const auto& part : split(v, ',')) {
                 d.push_back(parse_number<int>(part, "model.dilations"));
             }
             c.dilations = std::move(d);
         }},
        {"model.context_size",
         [](RunConfig& c, const std::string& v) {
             c.context_size = parse_number<std::size_t>(v, "model.context_size");
         }},
        {"loss.gamma",
         [](RunConfig& c, const std::string& v) { c.gamma = parse_number<double>(v, "loss.gamma"); }},
        {"loss.q_center",
         [](RunConfig& c, const std::string& v) {
             c.q_center = parse_number<double>(v, "loss.q_center");
         }},
        {"loss.q_lower",
         [](RunConfig& c, const std::string& v) {
             c.q_lower = parse_number<double>(v, "loss.q_lower");
         }},
        {"loss.q_upper",
         [](RunConfig& c, const std::string& v) {
             c.q_upper = parse_number<double>(v, "loss.q_upper");
         }},
        {"train.epochs",
         [](RunConfig& c, const std::string& v) { c.epochs = parse_number<int>(v, "train.epochs"); }},
        {"train.lr_schedule", [](RunConfig& c, const std::string& v) { c.lr_schedule = v; }},
        {"train.batch_schedule",
         [](RunConfig& c, const std::string& v) { c.batch_schedule = v; }},
        {"train.window_steps",
         [](RunConfig& c, const std::string& v) {
             c.window_steps = parse_number<int>(v, "train.window_steps");
         }},
        {"train.max_updates",
         [](RunConfig& c, const std::string& v) {
             c.max_updates = parse_number<int>(v, "train.max_updates");
         }},
        {"train.sub_epoch_power",
         [](RunConfig& c, const std::string& v) {
             c.sub_epoch_power = parse_number<double>(v, "train.sub_epoch_power");
         }},
        {"train.warmup_steps",
         [](RunConfig& c, const std::string& v) {
             c.warmup_steps = parse_number<int>(v, "train.warmup_steps");
         }},
        {"train.sub_epoch_clip",
         [](RunConfig& c, const std::string& v) {
             if (v != "min" && v != "max") {
                 throw ConfigError("config: train.sub_epoch_clip must be 'min' or 'max'");
             }
             c.sub_epoch_clip = v;
         }},
        {"train.grad_norm_cap",
         [](RunConfig& c, const std::string& v) {
             c.grad_norm_cap = parse_number<double>(v, "train.grad_norm_cap");
         }},
        {"train.seed",
         [](RunConfig& c, const std::string& v) {
             c.seed = parse_number<std::uint64_t>(v, "train.seed");
         }},
        {"ensemble.size",
         [](RunConfig& c, const std::string& v) {
             c.ensemble_size = parse_number<int>(v, "ensemble.size");
         }},
        {"eval.spin_up_days",
         [](RunConfig& c, const std::string& v) {
             c.spin_up_days = parse_number<int>(v, "eval.spin_up_days");
         }},
        {"ablation.no_context",
         [](RunConfig& c, const std::string& v) {
             c.no_context = parse_bool(v, "ablation.no_context");
         }},
        {"ablation.no_input_injection",
         [](RunConfig& c, const std::string& v) {
             c.no_input_injection = parse_bool(v, "ablation.no_input_injection");
         }},
        {"ablation.freeze_modulation",
         [](RunConfig& c, const std::string& v) {
             c.freeze_modulation = parse_bool(v, "ablation.freeze_modulation");
         }},
        {"ablation.short_train_span",
         [](RunConfig& c, const std::string& v) {
             c.short_train_span = parse_bool(v, "ablation.short_train_span");
         }},
        {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
    };

    auto it = setters.find(key);
    if (it == setters.end()) {
        throw ConfigError("config: unknown key '" + key + "'");
    }
    it->second(c, value);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            const std::vector<std::string>& overrides) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke + 1);
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        try {
            apply_override(cfg, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + err.what());
        }
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + ov + "' is not key=value");
        }
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path, overrides);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "data.path=" << c.data_path << '\n';
    out << "split.train_start=" << date_str(c.train_start) << '\n';
    out << "split.train_end=" << date_str(c.train_end) << '\n';
    out << "split.val_start=" << date_str(c.val_start) << '\n';
    out << "split.val_end=" << date_str(c.val_end) << '\n';
    out << "split.test_start=" << date_str(c.test_start) << '\n';
    out << "split.test_end=" << date_str(c.test_end) << '\n';
    out << "model.state_size=" << c.state_size << '\n';
    out << "model.control_size=" << c.control_size << '\n';
    out << "model.embed_dim=" << c.embed_dim << '\n';
    out << "model.dilations=";
    for (std::size_t i = 0; i < c.dilations.size(); ++i) {
        if (i) out << ',';
        out << c.dilations[i];
    }
    out << '\n';
    out << "model.context_size=" << c.context_size << '\n';
    out << "loss.gamma=" << c.gamma << '\n';
    out << "loss.q_center=" << c.q_center << '\n';
    out << "loss.q_lower=" << c.q_lower << '\n';
    out << "loss.q_upper=" << c.q_upper << '\n';
    out << "train.epochs=" << c.epochs << '\n';
    out << "train.lr_schedule=" << c.lr_schedule << '\n';
    out << "train.batch_schedule=" << c.batch_schedule << '\n';
    out << "train.window_steps=" << c.window_steps << '\n';
    out << "train.max_updates=" << c.max_updates << '\n';
    out << "train.sub_epoch_power=" << c.sub_epoch_power << '\n';
    out << "train.warmup_steps=" << c.warmup_steps << '\n';
    out << "train.sub_epoch_clip=" << c.sub_epoch_clip << '\n';
    out << "train.grad_norm_cap=" << c.grad_norm_cap << '\n';
    out << "train.seed=" << c.seed << '\n';
    out << "ensemble.size=" << c.ensemble_size << '\n';
    out << "eval.spin_up_days=" << c.spin_up_days << '\n';
    out << "ablation.no_context=" << (c.no_context ? "true" : "false") << '\n';
    out << "ablation.no_input_injection=" << (c.no_input_injection ? "true" : "false") << '\n';
    out << "ablation.freeze_modulation=" << (c.freeze_modulation ? "true" : "false") << '\n';
    out << "ablation.short_train_span=" << (c.short_train_span ? "true" : "false") << '\n';
    out << "output.dir=" << c.output_dir << '\n';
    return out.str();
}

namespace {

template <typename T>
std::map<int, T> parse_schedule(const std::string& s, const std::string& key) {
    std::map<int, T> out;
    for (const auto& part : split(s, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("config: bad schedule entry '" + part + "' in " + key);
        }
        const int epoch = parse_number<int>(part.substr(0, colon), key);
        out[epoch] = parse_number<T>(part.substr(colon + 1), key);
    }
    if (out.empty()) throw ConfigError("config: empty schedule " + key);
    return out;
}

} // namespace

ModelConfig RunConfig::model_config() const {
    ModelConfig m;
    m.state_size = state_size;
    m.control_size = control_size;
    m.embed_dim = embed_dim;
    m.dilations = dilations;
    m.context_size = context_size;
    m.loss.gamma = gamma;
    m.loss.q_center = q_center;
    m.loss.q_lower = q_lower;
    m.loss.q_upper = q_upper;
    m.attention = true;
    m.inject_input = !no_input_injection;
    m.use_context = !no_context;
    m.adapt_modulation = !freeze_modulation;
    return m;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.epochs = epochs;
    t.lr_schedule = parse_schedule<double>(lr_schedule, "train.lr_schedule");
    t.batch_schedule = parse_schedule<int>(batch_schedule, "train.batch_schedule");
    t.max_window_steps = window_steps;
    t.max_updates_per_epoch = max_updates;
    t.sub_epoch_power = sub_epoch_power;
    t.warmup_steps = warmup_steps;
    t.seed = seed;
    t.clip_mode = sub_epoch_clip == "max" ? SubEpochClip::MaxForm : SubEpochClip::PrintedMin;
    t.grad_norm_cap = grad_norm_cap;
    return t;
}

DayRange RunConfig::train_range() const {
    if (!train_start || !train_end) {
        throw ConfigError("config: split.train_start and split.train_end are required");
    }
    DayRange r{day_index(*train_start), day_index(*train_end)};
    if (short_train_span) {
        r.first = std::max(r.first, r.last - 730);
    }
    if (r.last < r.first) throw ConfigError("config: empty training range");
    return r;
}

DayRange RunConfig::test_range() const {
    if (!test_start || !test_end) {
        throw ConfigError("config: split.test_start and split.test_end are required");
    }
    DayRange r{day_index(*test_start), day_index(*test_end)};
    if (r.last < r.first) throw ConfigError("config: empty test range");
    return r;
}

} // namespace loadcast
