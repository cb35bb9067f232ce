// config.cpp — YAML run configuration

#include "qsd/config.hpp"

#include "qsd/schedule.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <functional>
#include <map>

namespace qsd {

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::trajectory: return "trajectory";
        case Experiment::density: return "density";
        case Experiment::dwell: return "dwell";
        case Experiment::cascade: return "cascade";
        case Experiment::collapse_time: return "collapse_time";
        case Experiment::validate: return "validate";
    }
    return "?";
}

Experiment parse_experiment(std::string_view name) {
    for (Experiment e : {Experiment::trajectory, Experiment::density, Experiment::dwell, Experiment::cascade,
                         Experiment::collapse_time, Experiment::validate}) {
        if (name == to_string(e)) return e;
    }
    if (name == "collapse-time") return Experiment::collapse_time;
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

namespace {

std::string where(const std::string& source, const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.line < 0) return source;
    return source + ":" + std::to_string(mark.line + 1);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key, const std::string& at, const char* expected) {
    if (!node.IsScalar()) throw ConfigError(at + ": key '" + key + "' expects " + expected);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(at + ": key '" + key + "' expects " + expected + ", got '" + node.Scalar() + "'");
    }
}

template <typename T>
std::vector<T> sequence(const YAML::Node& node, const std::string& key, const std::string& at, const char* expected) {
    std::vector<T> out;
    if (node.IsScalar()) {
        out.push_back(scalar<T>(node, key, at, expected));
        return out;
    }
    if (!node.IsSequence()) throw ConfigError(at + ": key '" + key + "' expects a list of " + expected);
    for (const auto& item : node) out.push_back(scalar<T>(item, key, at, expected));
    return out;
}

using Setter = std::function<void(RunConfig&, const YAML::Node&, const std::string& key, const std::string& at)>;

template <typename Fn>
Setter wrap(Fn fn) {
    return [fn](RunConfig& c, const YAML::Node& n, const std::string& key, const std::string& at) {
        try {
            fn(c, n, key, at);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(at + ": key '" + key + "': " + e.what());
        }
    };
}

const std::map<std::string, Setter>& setters() {
    using N = const YAML::Node&;
    using S = const std::string&;
    static const std::map<std::string, Setter> table = {
        {"system", wrap([](RunConfig& c, N n, S k, S at) {
             const auto v = scalar<std::string>(n, k, at, "spin_half or spin_one");
             if (v == "spin_half") c.system = Spin::half;
             else if (v == "spin_one") c.system = Spin::one;
             else throw ConfigError(at + ": key 'system' expects spin_half or spin_one, got '" + v + "'");
         })},
        {"M_z", wrap([](RunConfig& c, N n, S k, S at) { c.M_z = scalar<double>(n, k, at, "a number"); })},
        {"M_x", wrap([](RunConfig& c, N n, S k, S at) { c.M_x = scalar<double>(n, k, at, "a number"); })},
        {"M_x_sweep", wrap([](RunConfig& c, N n, S k, S at) { c.M_x_sweep = sequence<double>(n, k, at, "numbers"); })},
        {"T", wrap([](RunConfig& c, N n, S k, S at) { c.T = scalar<double>(n, k, at, "a number"); })},
        {"dt", wrap([](RunConfig& c, N n, S k, S at) { c.dt = scalar<double>(n, k, at, "a number"); })},
        {"duration", wrap([](RunConfig& c, N n, S k, S at) { c.duration = scalar<double>(n, k, at, "a number"); })},
        {"stepper", wrap([](RunConfig& c, N n, S k, S at) {
             c.stepper = parse_stepper(scalar<std::string>(n, k, at, "kraus or euler"));
         })},
        {"seed", wrap([](RunConfig& c, N n, S k, S at) { c.seed = scalar<std::uint64_t>(n, k, at, "a non-negative integer"); })},
        {"n_trajectories", wrap([](RunConfig& c, N n, S k, S at) {
             c.n_trajectories = scalar<std::int64_t>(n, k, at, "an integer");
         })},
        {"experiment", wrap([](RunConfig& c, N n, S k, S at) {
             c.experiment = parse_experiment(scalar<std::string>(n, k, at, "an experiment name"));
         })},
        {"initial", wrap([](RunConfig& c, N n, S k, S at) {
             c.initial = scalar<std::string>(n, k, at, "a preset name");
             parse_preset(c.initial);
         })},
        {"output_dir", wrap([](RunConfig& c, N n, S k, S at) { c.output_dir = scalar<std::string>(n, k, at, "a path"); })},
        {"sample_stride", wrap([](RunConfig& c, N n, S k, S at) {
             c.sample_stride = scalar<std::int64_t>(n, k, at, "an integer");
         })},
        {"threads", wrap([](RunConfig& c, N n, S k, S at) { c.threads = scalar<unsigned>(n, k, at, "a non-negative integer"); })},
        {"bins", wrap([](RunConfig& c, N n, S k, S at) { c.bins = scalar<int>(n, k, at, "an integer"); })},
        {"radius", wrap([](RunConfig& c, N n, S k, S at) { c.radius = scalar<double>(n, k, at, "a number"); })},
        {"epsilon", wrap([](RunConfig& c, N n, S k, S at) { c.epsilon = scalar<double>(n, k, at, "a number"); })},
        {"threshold", wrap([](RunConfig& c, N n, S k, S at) { c.threshold = scalar<double>(n, k, at, "a number"); })},
        {"observable", wrap([](RunConfig& c, N n, S k, S at) {
             const auto v = scalar<std::string>(n, k, at, "Sz or Sx");
             if (v == "Sz") c.observable = Observable::Sz;
             else if (v == "Sx") c.observable = Observable::Sx;
             else throw ConfigError(at + ": key 'observable' expects Sz or Sx, got '" + v + "'");
         })},
        {"targets", wrap([](RunConfig& c, N n, S k, S at) { c.targets = sequence<int>(n, k, at, "eigenvalue labels"); })},
        {"checks", wrap([](RunConfig& c, N n, S k, S at) { c.checks = sequence<std::string>(n, k, at, "check ids"); })},
    };
    return table;
}

void apply_node(RunConfig& config, const std::string& key, const YAML::Node& value, const std::string& at) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(at + ": unknown key '" + key + "'");
    it->second(config, value, key, at);
}

RunConfig parse_root(const YAML::Node& root, const std::string& source) {
    RunConfig config;
    if (root.IsNull()) return config;
    if (!root.IsMap()) throw ConfigError(where(source, root) + ": configuration must be a mapping of keys to values");
    for (const auto& entry : root) {
        const auto key = entry.first.as<std::string>();
        apply_node(config, key, entry.second, where(source, entry.first));
    }
    return config;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    return parse_root(root, source);
}

RunConfig load_config_file(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError(path + ": cannot read configuration file");
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    return parse_root(root, path);
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set " + assignment + ": expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    YAML::Node node;
    try {
        node = YAML::Load(value);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("--set " + assignment + ": " + e.msg);
    }
    if (node.IsNull()) node = YAML::Node(value);
    apply_node(config, key, node, "--set " + key);
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid configuration: " + msg); };
    if (!(M_z >= 0.0) || !(M_x >= 0.0)) fail("M_z and M_x must be non-negative");
    for (double m : M_x_sweep)
        if (!(m >= 0.0)) fail("M_x_sweep entries must be non-negative");
    if (n_trajectories < 1) fail("n_trajectories must be at least 1");
    if (bins < 1) fail("bins must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 0.5)");
    if (!(threshold > 0.5 && threshold < 1.0)) fail("threshold must lie in (0.5, 1)");
    if (!(radius > 0.0)) fail("radius must be positive");
    try {
        EngineConfig e = engine_config();
        // Single-window experiments ignore duration.
        if (experiment == Experiment::cascade || experiment == Experiment::collapse_time ||
            experiment == Experiment::validate) {
            e.duration = T;
        }
        e.validate();
        preset_state(build_model(system), initial);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if ((experiment == Experiment::cascade) && system != Spin::one) fail("the cascade experiment requires spin_one");
}

EngineConfig RunConfig::engine_config(double M_x_override) const {
    EngineConfig e;
    e.model = build_model(system);
    e.schedule = schedule_from_strengths(M_z, M_x_override >= 0.0 ? M_x_override : M_x, T);
    e.dt = dt;
    e.duration = duration;
    e.stepper = stepper;
    e.seed = seed;
    e.sample_stride = sample_stride;
    return e;
}

nlohmann::json RunConfig::to_json() const {
    return {{"system", system == Spin::half ? "spin_half" : "spin_one"},
            {"M_z", M_z},
            {"M_x", M_x},
            {"M_x_sweep", M_x_sweep},
            {"T", T},
            {"dt", dt},
            {"duration", duration},
            {"stepper", qsd::to_string(stepper)},
            {"seed", seed},
            {"n_trajectories", n_trajectories},
            {"experiment", qsd::to_string(experiment)},
            {"initial", initial},
            {"output_dir", output_dir},
            {"sample_stride", sample_stride},
            {"threads", threads},
            {"bins", bins},
            {"radius", radius},
            {"epsilon", epsilon},
            {"threshold", threshold},
            {"observable", qsd::to_string(observable)},
            {"targets", targets},
            {"checks", checks}};
}

}  // namespace qsd
