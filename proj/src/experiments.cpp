// experiments.cpp — CLI experiment drivers and file output

#include "qsd/experiments.hpp"

#include "qsd/analysis.hpp"
#include "qsd/checks.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/schedule.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#ifndef QSD_VERSION
#define QSD_VERSION "unknown"
#endif

namespace qsd {

const char* code_version() { return QSD_VERSION; }

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string label_name(int label) { return label > 0 ? "+1" : std::to_string(label); }

fs::path prepare_dir(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

// Binary mode keeps LF line endings on every platform.
class OutputFile {
public:
    explicit OutputFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }
    void line(const std::string& s) { out_ << s << '\n'; }
    void raw(const std::string& s) { out_ << s; }
    const fs::path& close() {
        out_.close();
        if (!out_) throw std::runtime_error("error writing " + path_.string());
        return path_;
    }

private:
    fs::path path_;
    std::ofstream out_;
};

fs::path write_summary(const fs::path& dir, const RunConfig& config, json body) {
    body["config"] = config.to_json();
    body["code_version"] = code_version();
    OutputFile f(dir / "summary.json");
    f.raw(body.dump(2));
    f.line("");
    return f.close();
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
    return s;
}

json nan_to_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

DensityMatrix initial_state(const RunConfig& config) {
    return preset_state(build_model(config.system), config.initial);
}

}  // namespace

ExperimentResult cmd_trajectory(const RunConfig& config) {
    config.validate();
    const fs::path dir = prepare_dir(config);
    const EngineConfig base = config.engine_config();
    const DensityMatrix initial = initial_state(config);
    const bool spin_one = config.system == Spin::one;
    const std::string header = spin_one ? "time,Sx,Sy,Sz,pz_plus,pz_zero,pz_minus,px_plus,px_zero,px_minus"
                                        : "time,rx,rz,pz_plus,pz_minus,px_plus,px_minus";

    const auto records = parallel_map(static_cast<std::size_t>(config.n_trajectories), config.threads, [&](std::size_t i) {
        EngineConfig e = base;
        e.seed = config.seed + i;
        return run_trajectory(e, initial);
    });

    ExperimentResult result;
    json per = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const fs::path path = config.n_trajectories == 1 ? dir / "trajectory.csv"
                                                         : dir / fmt::format("trajectory_{}.csv", i);
        OutputFile f(path);
        f.line(header);
        for (std::size_t k = 0; k < rec.size(); ++k) {
            std::vector<std::string> row{num(rec.times[k])};
            if (spin_one) {
                for (double s : rec.spin_xyz[k]) row.push_back(num(s));
            } else {
                row.push_back(num(rec.coherence[k][0]));
                row.push_back(num(rec.coherence[k][2]));
            }
            for (double p : rec.eig_probs_z[k]) row.push_back(num(p));
            for (double p : rec.eig_probs_x[k]) row.push_back(num(p));
            f.line(join(row));
        }
        result.files.push_back(f.close());
        per.push_back({{"file", path.filename().string()},
                       {"seed", config.seed + i},
                       {"rows", rec.size()},
                       {"euler_positivity_violations", rec.diagnostics.positivity_violations}});
    }
    result.files.push_back(write_summary(dir, config, {{"experiment", "trajectory"}, {"trajectories", per}}));
    return result;
}

ExperimentResult cmd_density(const RunConfig& config) {
    config.validate();
    const fs::path dir = prepare_dir(config);
    const SpinModel model = build_model(config.system);
    const EngineConfig base = config.engine_config();
    const DensityMatrix initial = initial_state(config);

    struct Partial {
        Histogram2D hist;
        RegionTally tally;
    };
    const auto partials = parallel_map(static_cast<std::size_t>(config.n_trajectories), config.threads, [&](std::size_t i) {
        EngineConfig e = base;
        e.seed = config.seed + i;
        Partial p{Histogram2D(config.bins), make_region_tally(config.system, config.radius)};
        stream_trajectory(e, initial, [&](std::int64_t, const ComplexMatrix& rho) {
            const auto pt = plane_point(model, rho);
            p.hist.add(pt[0], pt[1]);
            p.tally.add(pt[0], pt[1]);
        });
        return p;
    });
    Histogram2D hist(config.bins);
    RegionTally tally = make_region_tally(config.system, config.radius);
    for (const auto& p : partials) {
        hist.merge(p.hist);
        tally.merge(p.tally);
    }

    ExperimentResult result;
    OutputFile f(dir / "density.csv");
    f.line("bin_x_center,bin_y_center,mass,density");
    for (int ix = 0; ix < hist.bins; ++ix)
        for (int iy = 0; iy < hist.bins; ++iy)
            f.line(join({num(hist.x_center(ix)), num(hist.y_center(iy)), std::to_string(hist.at(ix, iy)),
                         num(hist.density(ix, iy))}));
    result.files.push_back(f.close());

    json regions = json::object();
    double outer = 0.0;
    for (std::size_t k = 0; k < tally.regions.size(); ++k) {
        const auto& name = tally.regions[k].name;
        regions[name] = {{"mass", tally.counts[k]},
                         {"fraction", static_cast<double>(tally.counts[k]) / static_cast<double>(tally.total)}};
        if (name != "center") outer += 0.25 * static_cast<double>(tally.counts[k]);
    }
    json body = {{"experiment", "density"},
                 {"plane", config.system == Spin::half ? "(r_x, r_z)" : "(Sx, Sz)"},
                 {"samples", hist.total},
                 {"bins", hist.bins},
                 {"radius", config.radius},
                 {"regions", regions}};
    if (config.system == Spin::one) {
        body["petal_mass"] = tally.petal;
        body["petal_fraction"] = static_cast<double>(tally.petal) / static_cast<double>(tally.total);
        body["center_to_outer_ratio"] = nan_to_null(static_cast<double>(tally.count("center")) / outer);
    }
    result.files.push_back(write_summary(dir, config, body));
    return result;
}

ExperimentResult cmd_dwell(const RunConfig& config) {
    config.validate();
    const fs::path dir = prepare_dir(config);
    const SpinModel model = build_model(config.system);
    const DensityMatrix initial = initial_state(config);
    const std::vector<double> sweep = config.M_x_sweep.empty() ? std::vector<double>{config.M_x} : config.M_x_sweep;

    ExperimentResult result;
    OutputFile f(dir / "dwell.csv");
    f.line("M_x,label,mean_dwell,standard_error,runs,incomplete_outcomes,unterminated_runs");
    json rows = json::array();
    for (double Mx : sweep) {
        const EngineConfig base = config.engine_config(Mx);
        base.validate();
        const auto stats = parallel_map(static_cast<std::size_t>(config.n_trajectories), config.threads, [&](std::size_t i) {
            EngineConfig e = base;
            e.seed = config.seed + i;
            e.sample_stride = e.steps_per_half();
            std::vector<std::vector<double>> ends;
            const std::int64_t half = e.steps_per_half();
            stream_trajectory(e, initial, [&](std::int64_t step, const ComplexMatrix& rho) {
                if (step > 0 && (step / half) % 2 == 1) ends.push_back(eigen_probabilities(model, rho, Observable::Sz));
            });
            return dwell_times(outcome_sequence(model, ends, config.epsilon));
        });
        DwellStats total;
        for (const auto& s : stats) total.merge(s);
        json per = json::object();
        for (int label : model.labels) {
            f.line(join({num(Mx), label_name(label), num(total.mean(label)), num(total.standard_error(label)),
                         std::to_string(total.completed_runs(label)), std::to_string(total.incomplete_outcomes),
                         std::to_string(total.unterminated_runs)}));
            per[label_name(label)] = {{"mean", nan_to_null(total.mean(label))},
                                      {"standard_error", nan_to_null(total.standard_error(label))},
                                      {"runs", total.completed_runs(label)}};
        }
        rows.push_back({{"M_x", Mx},
                        {"labels", per},
                        {"incomplete_outcomes", total.incomplete_outcomes},
                        {"unterminated_runs", total.unterminated_runs}});
    }
    result.files.push_back(f.close());
    result.files.push_back(write_summary(
        dir, config,
        {{"experiment", "dwell"}, {"outcomes_per_trajectory", std::llround(config.duration / config.T)}, {"sweep", rows}}));
    return result;
}

ExperimentResult cmd_cascade(const RunConfig& config) {
    config.validate();
    const fs::path dir = prepare_dir(config);
    const SpinModel model = build_model(Spin::one);
    const WindowSpec window{Observable::Sx, strength_to_amplitude(config.M_x, config.T), config.dt,
                            static_cast<std::int64_t>(std::llround(config.T / 2.0 / config.dt)), config.stepper};
    ComplexMatrix rho = initial_state(config).mat();
    NoiseSource noise(config.seed);
    StepDiagnostics diag;

    CascadeTrace trace;
    const auto record = [&](std::int64_t step, const ComplexMatrix& m) {
        trace.times.push_back(static_cast<double>(step) * config.dt);
        trace.probs.push_back(born_probabilities(model, m, Observable::Sx));
    };
    record(0, rho);
    AbsorbingMonitor monitor(3);
    monitor.observe(0.0, trace.probs.front());
    evolve_window(model, window, rho, noise, diag, [&](std::int64_t step, const ComplexMatrix& m) {
        monitor.observe(static_cast<double>(step) * config.dt, eigen_probabilities(model, m, Observable::Sx));
        if (step % config.sample_stride == 0 || step == window.steps) record(step, m);
        return true;
    });

    ExperimentResult result;
    OutputFile f(dir / "cascade.csv");
    f.line("time,px_plus,px_zero,px_minus");
    for (std::size_t k = 0; k < trace.times.size(); ++k)
        f.line(join({num(trace.times[k]), num(trace.probs[k][0]), num(trace.probs[k][1]), num(trace.probs[k][2])}));
    result.files.push_back(f.close());

    json zeros = json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& z = monitor.first_zero()[i];
        zeros[label_name(model.labels[i])] = {{"first_zero_time", z ? json(*z) : json(nullptr)},
                                              {"max_after_zero", z ? json(monitor.max_after_zero()[i]) : json(nullptr)}};
    }
    const auto final_label = classify_eigenstate(model, rho, Observable::Sx, config.epsilon);
    result.files.push_back(write_summary(dir, config,
                                         {{"experiment", "cascade"},
                                          {"first_zero_crossings", zeros},
                                          {"absorbing_zero_holds", monitor.holds()},
                                          {"absorbing_violations", monitor.violations()},
                                          {"final_label", final_label ? json(label_name(*final_label)) : json(nullptr)}}));
    return result;
}

ExperimentResult cmd_collapse_time(const RunConfig& config) {
    config.validate();
    if (config.targets.empty()) throw ConfigError("invalid configuration: collapse_time needs 'targets'");
    const fs::path dir = prepare_dir(config);
    const SpinModel model = build_model(config.system);
    CollapseTimeSpec spec;
    spec.observable = config.observable;
    spec.amplitude =
        strength_to_amplitude(config.observable == Observable::Sz ? config.M_z : config.M_x, config.T);
    spec.window = config.T / 2.0;
    spec.dt = config.dt;
    spec.stepper = config.stepper;
    spec.targets = config.targets;
    spec.n_trajectories = config.n_trajectories;
    spec.seed = config.seed;
    spec.threads = config.threads;
    const CollapseTimeStats stats = collapse_times(model, initial_state(config), spec, config.threshold);

    ExperimentResult result;
    OutputFile f(dir / "collapse_times.csv");
    f.line("target,mean_time,standard_error,arrivals");
    json per = json::object();
    for (int t : config.targets) {
        const auto it = stats.arrivals.find(t);
        const std::size_t n = it == stats.arrivals.end() ? 0 : it->second.size();
        f.line(join({label_name(t), num(stats.mean(t)), num(stats.standard_error(t)), std::to_string(n)}));
        per[label_name(t)] = {{"mean", nan_to_null(stats.mean(t))},
                              {"standard_error", nan_to_null(stats.standard_error(t))},
                              {"arrivals", n}};
    }
    f.line(join({"any", num(stats.mean()), num(stats.standard_error()), std::to_string(stats.arrived())}));
    result.files.push_back(f.close());
    result.files.push_back(write_summary(dir, config,
                                         {{"experiment", "collapse_time"},
                                          {"amplitude", spec.amplitude},
                                          {"threshold", stats.threshold},
                                          {"mean", nan_to_null(stats.mean())},
                                          {"standard_error", nan_to_null(stats.standard_error())},
                                          {"arrivals", stats.arrived()},
                                          {"non_arrivals", stats.non_arrivals},
                                          {"targets", per}}));
    return result;
}

ExperimentResult cmd_validate(const RunConfig& config, std::ostream& log) {
    const fs::path dir = prepare_dir(config);
    CheckOptions options;
    options.seed = config.seed;
    options.threads = config.threads;
    ExperimentResult result;
    json checks = json::array();
    for (const auto& r : run_checks(config.checks, options, [&](const CheckResult& r) {
             log << fmt::format("{:<4} {} [{}] {} ({:.1f} s)\n", r.id, r.passed ? "PASS" : "FAIL", r.title, r.summary,
                                r.seconds)
                 << std::flush;
         })) {
        result.passed = result.passed && r.passed;
        checks.push_back(to_json(r));
    }
    OutputFile f(dir / "validate.json");
    json body = {{"experiment", "validate"},
                 {"all_passed", result.passed},
                 {"checks", checks},
                 {"config", config.to_json()},
                 {"code_version", code_version()}};
    f.raw(body.dump(2));
    f.line("");
    result.files.push_back(f.close());
    return result;
}

ExperimentResult run_experiment(const RunConfig& config, std::ostream& log) {
    switch (config.experiment) {
        case Experiment::trajectory: return cmd_trajectory(config);
        case Experiment::density: return cmd_density(config);
        case Experiment::dwell: return cmd_dwell(config);
        case Experiment::cascade: return cmd_cascade(config);
        case Experiment::collapse_time: return cmd_collapse_time(config);
        case Experiment::validate: return cmd_validate(config, log);
    }
    throw std::logic_error("unhandled experiment");
}

}  // namespace qsd
