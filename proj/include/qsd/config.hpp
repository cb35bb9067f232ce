// config.hpp — Run configuration file (YAML) and command-line overrides

#pragma once

#include "qsd/engine.hpp"
#include "qsd/spin_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsd {

// Invalid configuration; the message names the key and, for file input, the line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { trajectory, density, dwell, cascade, collapse_time, validate };

std::string to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

struct RunConfig {
    Spin system = Spin::one;
    double M_z = 8.0;
    double M_x = 8.0;
    std::vector<double> M_x_sweep;  // dwell only; empty means {M_x}
    double T = 2.0;
    double dt = 1e-4;
    double duration = 20.0;
    StepperKind stepper = StepperKind::kraus;
    std::uint64_t seed = 1;
    std::int64_t n_trajectories = 1;
    Experiment experiment = Experiment::trajectory;
    std::string initial = "mixed_start";
    std::string output_dir = "out";
    std::int64_t sample_stride = 10;
    unsigned threads = 0;
    int bins = 200;
    double radius = 0.1;
    double epsilon = 1e-3;
    double threshold = 0.999;
    Observable observable = Observable::Sz;
    std::vector<int> targets;
    std::vector<std::string> checks;

    // Cross-field checks; throws ConfigError.
    void validate() const;
    EngineConfig engine_config(double M_x_override = -1.0) const;
    nlohmann::json to_json() const;
};

// Unknown keys and malformed values throw ConfigError with the line number.
RunConfig load_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

// Applies "key=value"; the value is read as a YAML scalar or flow sequence.
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace qsd
