// test_config_cli.cpp — YAML configuration and end-to-end CLI runs

#include "qsd/config.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qsd_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(QSD_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("configuration parsing") {
    const RunConfig c = parse_config_text("system: spin_half\nM_z: 2\nM_x_sweep: [0.5, 1]\nstepper: euler\n", "cfg");
    CHECK(c.system == Spin::half);
    CHECK(c.M_z == 2.0);
    CHECK(c.M_x_sweep == std::vector<double>{0.5, 1.0});
    CHECK(c.stepper == StepperKind::euler);
    CHECK(c.M_x == 8.0);

    SUBCASE("unknown keys are rejected with their line") {
        try {
            parse_config_text("M_z: 2\n\nMz: 3\n", "run.yaml");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("run.yaml:3") != std::string::npos);
            CHECK(msg.find("Mz") != std::string::npos);
        }
    }
    SUBCASE("type errors name the key") {
        CHECK_THROWS_WITH_AS(parse_config_text("dt: fast\n", "c"), doctest::Contains("'dt'"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("system: spin_two\n", "c"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("initial: eig_q(1)\n", "c"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("- 1\n- 2\n", "c"), ConfigError);
    }
    SUBCASE("overrides") {
        RunConfig r;
        apply_override(r, "M_x=0.5");
        apply_override(r, "targets=[1, -1]");
        apply_override(r, "initial=eig_z(-1)");
        CHECK(r.M_x == 0.5);
        CHECK(r.targets == std::vector<int>{1, -1});
        CHECK(r.initial == "eig_z(-1)");
        CHECK_THROWS_AS(apply_override(r, "M_x"), ConfigError);
        CHECK_THROWS_AS(apply_override(r, "nope=1"), ConfigError);
    }
    SUBCASE("semantic validation") {
        RunConfig r;
        CHECK_NOTHROW(r.validate());
        r.dt = 0.3;
        CHECK_THROWS_AS(r.validate(), ConfigError);
        r = RunConfig{};
        r.system = Spin::half;
        r.experiment = Experiment::cascade;
        CHECK_THROWS_AS(r.validate(), ConfigError);
        r = RunConfig{};
        r.threshold = 1.0;
        CHECK_THROWS_AS(r.validate(), ConfigError);
    }
}

TEST_CASE("trajectory runs are byte-reproducible") {
    const fs::path a = scratch("traj_a"), b = scratch("traj_b");
    const std::string common = "trajectory --seed 11 --set duration=4 --set dt=1e-3 --set sample_stride=10 ";
    REQUIRE(run_cli(common + "--out " + a.string(), a / "log.txt") == 0);
    REQUIRE(run_cli(common + "--out " + b.string(), b / "log.txt") == 0);
    const std::string ta = slurp(a / "trajectory.csv");
    CHECK(!ta.empty());
    CHECK(ta == slurp(b / "trajectory.csv"));

    const auto rows = lines(a / "trajectory.csv");
    CHECK(rows.front() == "time,Sx,Sy,Sz,pz_plus,pz_zero,pz_minus,px_plus,px_zero,px_minus");
    CHECK(rows.size() == 1 + 4.0 / 1e-3 / 10 + 1);
    CHECK(ta.find('\r') == std::string::npos);
}

TEST_CASE("spin-1/2 trajectory header and multiple trajectories") {
    const fs::path out = scratch("traj_half");
    REQUIRE(run_cli("trajectory --set system=spin_half --set duration=2 --set dt=1e-3 --set n_trajectories=2 --out " +
                        out.string(),
                    out / "log.txt") == 0);
    CHECK(lines(out / "trajectory_0.csv").front() == "time,rx,rz,pz_plus,pz_minus,px_plus,px_minus");
    CHECK(fs::exists(out / "trajectory_1.csv"));
    CHECK(slurp(out / "trajectory_0.csv") != slurp(out / "trajectory_1.csv"));
}

TEST_CASE("density, dwell, cascade and collapse-time smoke runs") {
    SUBCASE("density") {
        const fs::path out = scratch("density");
        REQUIRE(run_cli("density --set duration=20 --set dt=1e-3 --set bins=20 --out " + out.string(), out / "log.txt") == 0);
        const auto rows = lines(out / "density.csv");
        CHECK(rows.front() == "bin_x_center,bin_y_center,mass,density");
        CHECK(rows.size() == 1 + 20 * 20);
        const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
        CHECK(summary.contains("code_version"));
        CHECK(summary.at("config").at("bins") == 20);
    }
    SUBCASE("dwell") {
        const fs::path out = scratch("dwell");
        REQUIRE(run_cli("dwell --set duration=40 --set dt=1e-3 --set M_z=32 --set 'M_x_sweep=[32,2]' --out " + out.string(),
                        out / "log.txt") == 0);
        const auto rows = lines(out / "dwell.csv");
        CHECK(rows.front() == "M_x,label,mean_dwell,standard_error,runs,incomplete_outcomes,unterminated_runs");
        CHECK(rows.size() == 1 + 2 * 3);
    }
    SUBCASE("cascade") {
        const fs::path out = scratch("cascade");
        REQUIRE(run_cli("cascade --set 'initial=eig_z(-1)' --set dt=1e-3 --out " + out.string(), out / "log.txt") == 0);
        const auto rows = lines(out / "cascade.csv");
        CHECK(rows.front() == "time,px_plus,px_zero,px_minus");
        CHECK(rows.size() > 2);
        CHECK(fs::exists(out / "summary.json"));
    }
    SUBCASE("collapse-time") {
        const fs::path out = scratch("collapse");
        REQUIRE(run_cli("collapse-time --set system=spin_half --set 'initial=eig_x(+1)' --set 'targets=[1,-1]' "
                        "--set n_trajectories=50 --set dt=1e-3 --set M_z=1 --out " +
                            out.string(),
                        out / "log.txt") == 0);
        const auto rows = lines(out / "collapse_times.csv");
        CHECK(rows.front() == "target,mean_time,standard_error,arrivals");
        CHECK(rows.size() == 1 + 2 + 1);
    }
}

TEST_CASE("invalid configuration exits with status 2 and a located message") {
    const fs::path out = scratch("bad");
    std::ofstream(out / "bad.yaml") << "M_z: 2\nbogus: 1\n";
    CHECK(run_cli("trajectory --config " + (out / "bad.yaml").string() + " --out " + out.string(), out / "log.txt") == 2);
    CHECK(slurp(out / "log.txt").find("bad.yaml:2") != std::string::npos);
    CHECK(run_cli("trajectory --set dt=0.5 --out " + out.string(), out / "log2.txt") == 2);
}
