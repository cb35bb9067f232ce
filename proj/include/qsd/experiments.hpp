// experiments.hpp — CLI experiments: run a RunConfig and write its outputs
//
// Output files (UTF-8, comma-separated, LF, header row, 17 significant digits):
//   trajectory  trajectory.csv (trajectory_<i>.csv when n_trajectories > 1)
//   density     density.csv, summary.json
//   dwell       dwell.csv, summary.json
//   cascade     cascade.csv, summary.json
//   collapse    collapse_times.csv, summary.json
//   validate    validate.json (one line per check also goes to the log stream)
// Every summary.json carries the configuration echo and the code version.

#pragma once

#include "qsd/config.hpp"

#include <filesystem>
#include <ostream>
#include <vector>

namespace qsd {

// Version string baked in at build time.
const char* code_version();

struct ExperimentResult {
    std::vector<std::filesystem::path> files;
    bool passed = true;  // validate only: every check passed
};

ExperimentResult cmd_trajectory(const RunConfig& config);
ExperimentResult cmd_density(const RunConfig& config);
ExperimentResult cmd_dwell(const RunConfig& config);
ExperimentResult cmd_cascade(const RunConfig& config);
ExperimentResult cmd_collapse_time(const RunConfig& config);
ExperimentResult cmd_validate(const RunConfig& config, std::ostream& log);

// Dispatches on config.experiment after validating the configuration.
ExperimentResult run_experiment(const RunConfig& config, std::ostream& log);

}  // namespace qsd
