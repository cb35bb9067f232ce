// acceptance_main.cpp — Runs the acceptance checks and prints one line each
//
// Usage: qsd_acceptance [ID ...] [--json PATH]

#include "qsd/checks.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> ids;
    std::string json_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--json" && i + 1 < argc) {
            json_path = argv[++i];
        } else {
            ids.push_back(arg);
        }
    }
    try {
        int failed = 0;
        const auto results = qsd::run_checks(ids, {}, [&](const qsd::CheckResult& r) {
            fmt::print("{:<4} {} [{}] {} ({:.1f} s)\n", r.id, r.passed ? "PASS" : "FAIL", r.title, r.summary,
                       r.seconds);
            std::fflush(stdout);
            failed += r.passed ? 0 : 1;
        });
        if (!json_path.empty()) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& r : results) out.push_back(qsd::to_json(r));
            std::ofstream(json_path) << out.dump(2) << "\n";
        }
        fmt::print("{} of {} acceptance checks passed\n", results.size() - static_cast<std::size_t>(failed),
                   results.size());
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "acceptance: {}\n", e.what());
        return 2;
    }
}
