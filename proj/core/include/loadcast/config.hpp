#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loadcast/model.hpp"
#include "loadcast/trainer.hpp"

namespace loadcast {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Effective run configuration: a line-oriented key=value file, each key
/// overridable on the command line. Unknown keys are rejected.
struct RunConfig {
    // data
    std::string data_path;
    std::optional<CivilDate> train_start, train_end;
    std::optional<CivilDate> val_start, val_end;
    std::optional<CivilDate> test_start, test_end;

    // model
    std::size_t state_size = 150;
    std::size_t control_size = 70;
    std::size_t embed_dim = 10;
    std::vector<int> dilations = {2, 4, 7};
    std::size_t context_size = 3;
    double gamma = 0.3;
    double q_center = 0.525;
    double q_lower = 0.045;
    double q_upper = 0.975;

    // training
    int epochs = 9;
    std::string lr_schedule = "1:3e-3,6:1e-3,7:3e-4,8:1e-4";
    std::string batch_schedule = "1:2,4:5";
    int window_steps = 50;
    int max_updates = 2000;
    double sub_epoch_power = 0.8;
    int warmup_steps = 7;
    std::string sub_epoch_clip = "min"; // printed formula; "max" reads N as a floor
    double grad_norm_cap = 0.0;
    std::uint64_t seed = 1;
    int ensemble_size = 5;

    // evaluation
    int spin_up_days = 91;

    // ablations
    bool no_context = false;        // Ab1
    bool no_input_injection = false; // Ab2
    bool freeze_modulation = false;  // Ab3
    bool short_train_span = false;   // Ab4: keep only the final two years

    std::string output_dir = ".";

    ModelConfig model_config() const;
    TrainConfig train_config() const;

    /// Training-target day range; requires the train split dates.
    DayRange train_range() const;
    DayRange test_range() const;
};

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            const std::vector<std::string>& overrides = {});
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
std::string serialize_config(const RunConfig& cfg);

} // namespace loadcast
