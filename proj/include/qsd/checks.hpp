// checks.hpp — Acceptance checks P1–P11
//
// Shared by `qsd validate` and the acceptance test binary. Each check runs
// a fixed-seed Monte Carlo experiment and compares against an oracle or a
// reference value at a fixed tolerance.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qsd {

struct CheckOptions {
    std::uint64_t seed = 20240517;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CheckResult {
    std::string id;        // "P1" ... "P11"
    std::string title;
    bool passed = false;
    std::string summary;   // one line with the measured values
    nlohmann::json details;
    double seconds = 0.0;
};

struct CheckInfo {
    std::string id;
    std::string title;
    std::function<CheckResult(const CheckOptions&)> run;
};

const std::vector<CheckInfo>& acceptance_checks();

// Unknown ids throw std::invalid_argument. An empty list runs every check.
std::vector<CheckResult> run_checks(const std::vector<std::string>& ids, const CheckOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result = {});

nlohmann::json to_json(const CheckResult& r);

}  // namespace qsd
