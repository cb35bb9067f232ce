// engine.hpp — Stochastic evolution of ρ under alternating measurement
//
// Two steppers share one interface:
//   * Kraus: per channel, M± = (I + A±)/√2 with A± = -iH dt - ½L†L dt ± L√dt;
//     the branch is drawn with probability Tr(M± ρ M±†)/(p+ + p-) and the state
//     renormalized. Positivity and unit trace are preserved at every step.
//   * Euler–Maruyama on the state-diffusion SDE with Gaussian dW ~ N(0, dt),
//     followed by re-Hermitization and trace renormalization. Positivity is not
//     enforced; violations below -1e-6 are counted in StepDiagnostics.

#pragma once

#include "qsd/matrix.hpp"
#include "qsd/noise.hpp"
#include "qsd/schedule.hpp"
#include "qsd/spin_model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qsd {

enum class StepperKind { kraus, euler };

std::string to_string(StepperKind k);
StepperKind parse_stepper(std::string_view name);

// Raised when the Kraus branch weights p+ + p- are not positive.
class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by run_trajectory; carries the failing time and a state dump.
class TrajectoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kEulerPositivityThreshold = -1e-6;

struct StepDiagnostics {
    std::int64_t positivity_violations = 0;
    double worst_min_eigenvalue = 0.0;

    void merge(const StepDiagnostics& o);
};

class KrausStepper {
public:
    KrausStepper(const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt);

    void step(ComplexMatrix& rho, NoiseSource& noise) const;

private:
    struct Branches {
        ComplexMatrix plus, plus_dag, minus, minus_dag;
        ComplexMatrix gram_plus, gram_minus;  // M†M
    };
    int dim_;
    std::vector<Branches> channels_;
    std::optional<ComplexMatrix> free_evolution_;  // I - iH dt when no channel is active
};

class EulerStepper {
public:
    EulerStepper(const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt);

    void step(ComplexMatrix& rho, NoiseSource& noise, StepDiagnostics& diag) const;

private:
    struct Channel {
        ComplexMatrix L, L_dag, gram;  // gram = L†L
    };
    int dim_;
    double dt_;
    ComplexMatrix H_;
    bool has_hamiltonian_;
    std::vector<Channel> channels_;
};

class Stepper {
public:
    Stepper(StepperKind kind, const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt);

    void step(ComplexMatrix& rho, NoiseSource& noise, StepDiagnostics& diag) const;

private:
    std::variant<KrausStepper, EulerStepper> impl_;
};

// Single steps on validated states. With more than one channel, channels are
// applied one after another within the step.
DensityMatrix kraus_step(const DensityMatrix& rho, const ComplexMatrix& H, std::span<const ComplexMatrix> channels,
                         double dt, NoiseSource& noise);
DensityMatrix euler_step(const DensityMatrix& rho, const ComplexMatrix& H, std::span<const ComplexMatrix> channels,
                         double dt, NoiseSource& noise, StepDiagnostics* diag = nullptr);

struct EngineConfig {
    SpinModel model = build_model(Spin::one);
    MeasurementSchedule schedule;
    double dt = 1e-4;
    double duration = 0.0;
    StepperKind stepper = StepperKind::kraus;
    std::uint64_t seed = 0;
    std::int64_t sample_stride = 10;
    std::optional<ComplexMatrix> hamiltonian;

    // dt > 0, dt ≤ T/20, T/2 an integer number of steps, duration a multiple of T.
    void validate() const;
    std::int64_t steps_per_half() const;
    std::int64_t total_steps() const;
    ComplexMatrix hamiltonian_or_zero() const;
};

struct TrajectoryRecord {
    std::vector<std::int64_t> steps;
    std::vector<double> times;
    std::vector<std::array<double, 3>> spin_xyz;
    std::vector<std::vector<double>> eig_probs_z;  // Tr(ρ P_i), eigenvalue descending
    std::vector<std::vector<double>> eig_probs_x;
    std::vector<CoherenceVector> coherence;
    DensityMatrix final_state;

    Spin spin = Spin::one;
    double dt = 0.0;
    std::int64_t steps_per_half = 0;
    StepDiagnostics diagnostics;

    std::size_t size() const noexcept { return times.size(); }
};

// Tr(ρ P_i) for the observable's projectors, in model order.
std::vector<double> eigen_probabilities(const SpinModel& model, const ComplexMatrix& rho, Observable o);

// Steps from t = 0 to config.duration, recording t = 0 and every
// sample_stride-th step. Deterministic in (config, initial).
TrajectoryRecord run_trajectory(const EngineConfig& config, const DensityMatrix& initial);

using SampleSink = std::function<void(std::int64_t step, const ComplexMatrix& rho)>;

struct StreamResult {
    StepDiagnostics diagnostics;
    DensityMatrix final_state;
};

// run_trajectory without storage: sink sees the same (step, ρ) pairs that
// run_trajectory would record.
StreamResult stream_trajectory(const EngineConfig& config, const DensityMatrix& initial, const SampleSink& sink);

// Called after each completed step with the 1-based step count; returning
// false stops the window early.
using StepObserver = std::function<bool(std::int64_t step, const ComplexMatrix& rho)>;

struct WindowSpec {
    Observable observable = Observable::Sz;
    double amplitude = 0.0;
    double dt = 1e-4;
    std::int64_t steps = 0;
    StepperKind stepper = StepperKind::kraus;
};

// Evolves rho through a single measurement window with L = amplitude·O.
// Returns the number of steps taken.
std::int64_t evolve_window(const SpinModel& model, const WindowSpec& window, ComplexMatrix& rho, NoiseSource& noise,
                           StepDiagnostics& diag, const StepObserver& observer = {});

}  // namespace qsd
