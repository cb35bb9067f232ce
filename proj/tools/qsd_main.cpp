// qsd_main.cpp — Command-line front end
//
//   qsd <trajectory|density|dwell|cascade|collapse-time|validate>
//       [--config PATH] [--seed N] [--out DIR] [--threads N] [--set key=value]...

#include "qsd/config.hpp"
#include "qsd/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "YAML run configuration");
    cmd->add_option("--seed", flags.seed, "base seed (trajectory i uses seed + i)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
    cmd->add_option("--set", flags.sets, "override a configuration key, key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum state diffusion under alternating S_z / S_x measurement"};
    app.set_version_flag("--version", qsd::code_version());
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, qsd::Experiment>> commands = {
        {"trajectory", qsd::Experiment::trajectory},       {"density", qsd::Experiment::density},
        {"dwell", qsd::Experiment::dwell},                 {"cascade", qsd::Experiment::cascade},
        {"collapse-time", qsd::Experiment::collapse_time}, {"validate", qsd::Experiment::validate},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, experiment] : commands) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(cmd, flags);
        subs.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        qsd::Experiment experiment = qsd::Experiment::trajectory;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) experiment = commands[i].second;

        qsd::RunConfig config = flags.config_path.empty() ? qsd::RunConfig{} : qsd::load_config_file(flags.config_path);
        for (const auto& s : flags.sets) qsd::apply_override(config, s);
        if (flags.seed) config.seed = *flags.seed;
        if (flags.out) config.output_dir = *flags.out;
        if (flags.threads) config.threads = *flags.threads;
        config.experiment = experiment;

        const auto result = qsd::run_experiment(config, std::cout);
        for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
        return result.passed ? 0 : 1;
    } catch (const qsd::ConfigError& e) {
        std::cerr << "qsd: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qsd: " << e.what() << "\n";
        return 1;
    }
}
