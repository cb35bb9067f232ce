// engine.cpp — Kraus and Euler–Maruyama steppers, trajectory driver

#include "qsd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qsd {

namespace {

// Fixed-dimension kernels; N is 2 or 3 so the loops unroll.
template <int N>
inline double re_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    double t = 0.0;
    for (int r = 0; r < N; ++r)
        for (int k = 0; k < N; ++k) {
            const Complex x = a(r, k);
            const Complex y = b(k, r);
            t += x.real() * y.real() - x.imag() * y.imag();
        }
    return t;
}

template <int N>
inline void mul(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            double re = 0.0;
            double im = 0.0;
            for (int k = 0; k < N; ++k) {
                const Complex x = a(r, k);
                const Complex y = b(k, c);
                re += x.real() * y.real() - x.imag() * y.imag();
                im += x.real() * y.imag() + x.imag() * y.real();
            }
            out(r, c) = Complex(re, im);
        }
}

// rho <- M rho M† / Tr(M rho M†), rebuilt Hermitian from the upper triangle.
template <int N>
inline void sandwich_normalize(const ComplexMatrix& M, const ComplexMatrix& M_dag, ComplexMatrix& rho) {
    double t_re[N][N];
    double t_im[N][N];
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            double re = 0.0;
            double im = 0.0;
            for (int k = 0; k < N; ++k) {
                const Complex x = M(r, k);
                const Complex y = rho(k, c);
                re += x.real() * y.real() - x.imag() * y.imag();
                im += x.real() * y.imag() + x.imag() * y.real();
            }
            t_re[r][c] = re;
            t_im[r][c] = im;
        }
    double out_re[N][N];
    double out_im[N][N];
    double tr = 0.0;
    for (int r = 0; r < N; ++r)
        for (int c = r; c < N; ++c) {
            double re = 0.0;
            double im = 0.0;
            for (int k = 0; k < N; ++k) {
                const Complex y = M_dag(k, c);
                re += t_re[r][k] * y.real() - t_im[r][k] * y.imag();
                im += t_re[r][k] * y.imag() + t_im[r][k] * y.real();
            }
            out_re[r][c] = re;
            out_im[r][c] = im;
            if (r == c) tr += re;
        }
    const double inv = 1.0 / tr;
    for (int r = 0; r < N; ++r) {
        rho(r, r) = Complex(out_re[r][r] * inv, 0.0);
        for (int c = r + 1; c < N; ++c) {
            rho(r, c) = Complex(out_re[r][c] * inv, out_im[r][c] * inv);
            rho(c, r) = Complex(out_re[r][c] * inv, -out_im[r][c] * inv);
        }
    }
}

std::string dump_state(const ComplexMatrix& m) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (int r = 0; r < m.dim(); ++r) {
        os << (r ? "; " : "");
        for (int c = 0; c < m.dim(); ++c) os << (c ? ", " : "") << m(r, c);
    }
    os << "]";
    return os.str();
}

template <int N>
void euler_kernel(const ComplexMatrix& rho_in, ComplexMatrix& rho_out, const ComplexMatrix& L,
                  const ComplexMatrix& L_dag, const ComplexMatrix& gram, double dt, double dW) {
    // Lρ, (Lρ)L†, (L†L)ρ. ρL† = (Lρ)† and ρL†L = ((L†L)ρ)† since ρ and L†L are Hermitian.
    ComplexMatrix l_rho(N);
    ComplexMatrix l_rho_ld(N);
    ComplexMatrix g_rho(N);
    mul<N>(L, rho_in, l_rho);
    mul<N>(l_rho, L_dag, l_rho_ld);
    mul<N>(gram, rho_in, g_rho);
    double expectation = 0.0;  // Tr[ρ(L + L†)] = 2 Re Tr(Lρ)
    for (int i = 0; i < N; ++i) expectation += 2.0 * l_rho(i, i).real();
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            const Complex drift = l_rho_ld(r, c) - 0.5 * (g_rho(r, c) + std::conj(g_rho(c, r)));
            const Complex noise = std::conj(l_rho(c, r)) + l_rho(r, c) - expectation * rho_in(r, c);
            rho_out(r, c) += drift * dt + noise * dW;
        }
}

}  // namespace

std::string to_string(StepperKind k) { return k == StepperKind::kraus ? "kraus" : "euler"; }

StepperKind parse_stepper(std::string_view name) {
    if (name == "kraus") return StepperKind::kraus;
    if (name == "euler") return StepperKind::euler;
    throw std::invalid_argument("unknown stepper '" + std::string(name) + "' (expected kraus or euler)");
}

void StepDiagnostics::merge(const StepDiagnostics& o) {
    positivity_violations += o.positivity_violations;
    worst_min_eigenvalue = std::min(worst_min_eigenvalue, o.worst_min_eigenvalue);
}

KrausStepper::KrausStepper(const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt)
    : dim_(H.dim()) {
    if (!(dt > 0.0)) throw std::invalid_argument("KrausStepper: dt must be positive");
    const ComplexMatrix I = ComplexMatrix::identity(dim_);
    const double root_dt = std::sqrt(dt);
    const double inv_root2 = 1.0 / std::sqrt(2.0);
    bool first = true;
    for (const auto& L : channels) {
        if (L.dim() != dim_) throw std::invalid_argument("KrausStepper: channel dimension mismatch");
        // H is folded into the first channel only.
        const ComplexMatrix h_part = first ? H * Complex(0.0, -dt) : ComplexMatrix(dim_);
        const ComplexMatrix base = h_part - dagger(L) * L * Complex(0.5 * dt);
        const ComplexMatrix jump = L * Complex(root_dt);
        Branches b;
        b.plus = (I + base + jump) * Complex(inv_root2);
        b.minus = (I + base - jump) * Complex(inv_root2);
        b.plus_dag = dagger(b.plus);
        b.minus_dag = dagger(b.minus);
        b.gram_plus = b.plus_dag * b.plus;
        b.gram_minus = b.minus_dag * b.minus;
        channels_.push_back(b);
        first = false;
    }
    if (channels_.empty() && max_abs(H) > 0.0) free_evolution_ = I + H * Complex(0.0, -dt);
}

void KrausStepper::step(ComplexMatrix& rho, NoiseSource& noise) const {
    if (free_evolution_) {
        const ComplexMatrix& M = *free_evolution_;
        const ComplexMatrix Md = dagger(M);
        if (dim_ == 2)
            sandwich_normalize<2>(M, Md, rho);
        else
            sandwich_normalize<3>(M, Md, rho);
        return;
    }
    for (const auto& b : channels_) {
        const double p_plus = dim_ == 2 ? re_trace_product<2>(b.gram_plus, rho) : re_trace_product<3>(b.gram_plus, rho);
        const double p_minus =
            dim_ == 2 ? re_trace_product<2>(b.gram_minus, rho) : re_trace_product<3>(b.gram_minus, rho);
        const double total = p_plus + p_minus;
        if (!(total > 0.0) || p_plus < 0.0 || p_minus < 0.0) {
            throw StepError("Kraus branch weights invalid (p+ = " + std::to_string(p_plus) +
                            ", p- = " + std::to_string(p_minus) + ")");
        }
        const bool take_plus = noise.uniform() * total < p_plus;
        const ComplexMatrix& M = take_plus ? b.plus : b.minus;
        const ComplexMatrix& Md = take_plus ? b.plus_dag : b.minus_dag;
        if (dim_ == 2)
            sandwich_normalize<2>(M, Md, rho);
        else
            sandwich_normalize<3>(M, Md, rho);
    }
}

EulerStepper::EulerStepper(const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt)
    : dim_(H.dim()), dt_(dt), H_(H), has_hamiltonian_(max_abs(H) > 0.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("EulerStepper: dt must be positive");
    for (const auto& L : channels) {
        if (L.dim() != dim_) throw std::invalid_argument("EulerStepper: channel dimension mismatch");
        channels_.push_back({L, dagger(L), dagger(L) * L});
    }
}

void EulerStepper::step(ComplexMatrix& rho, NoiseSource& noise, StepDiagnostics& diag) const {
    if (channels_.empty() && !has_hamiltonian_) return;
    ComplexMatrix next = rho;
    if (has_hamiltonian_) next += commutator(H_, rho) * Complex(0.0, -dt_);
    for (const auto& ch : channels_) {
        const double dW = noise.wiener(dt_);
        if (dim_ == 2)
            euler_kernel<2>(rho, next, ch.L, ch.L_dag, ch.gram, dt_, dW);
        else
            euler_kernel<3>(rho, next, ch.L, ch.L_dag, ch.gram, dt_, dW);
    }
    next = hermitian_part(next);
    next *= 1.0 / trace(next).real();
    const double lowest = min_eigenvalue(next);
    if (lowest < kEulerPositivityThreshold) {
        ++diag.positivity_violations;
        diag.worst_min_eigenvalue = std::min(diag.worst_min_eigenvalue, lowest);
    }
    rho = next;
}

Stepper::Stepper(StepperKind kind, const ComplexMatrix& H, std::span<const ComplexMatrix> channels, double dt)
    : impl_(kind == StepperKind::kraus ? std::variant<KrausStepper, EulerStepper>(KrausStepper(H, channels, dt))
                                       : std::variant<KrausStepper, EulerStepper>(EulerStepper(H, channels, dt))) {}

void Stepper::step(ComplexMatrix& rho, NoiseSource& noise, StepDiagnostics& diag) const {
    if (const auto* k = std::get_if<KrausStepper>(&impl_)) {
        k->step(rho, noise);
    } else {
        std::get<EulerStepper>(impl_).step(rho, noise, diag);
    }
}

DensityMatrix kraus_step(const DensityMatrix& rho, const ComplexMatrix& H, std::span<const ComplexMatrix> channels,
                         double dt, NoiseSource& noise) {
    if (H.dim() != rho.dim()) throw std::invalid_argument("kraus_step: Hamiltonian dimension mismatch");
    ComplexMatrix m = rho.mat();
    KrausStepper(H, channels, dt).step(m, noise);
    return DensityMatrix::unchecked(m);
}

DensityMatrix euler_step(const DensityMatrix& rho, const ComplexMatrix& H, std::span<const ComplexMatrix> channels,
                         double dt, NoiseSource& noise, StepDiagnostics* diag) {
    if (H.dim() != rho.dim()) throw std::invalid_argument("euler_step: Hamiltonian dimension mismatch");
    ComplexMatrix m = rho.mat();
    StepDiagnostics local;
    EulerStepper(H, channels, dt).step(m, noise, diag ? *diag : local);
    return DensityMatrix::unchecked(m);
}

void EngineConfig::validate() const {
    schedule.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("engine: dt must be positive");
    if (dt > schedule.period / 20.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("engine: dt must be at most T/20 (at least 10 steps per half-period)");
    }
    const double half_steps = schedule.period / (2.0 * dt);
    if (std::abs(half_steps - std::round(half_steps)) > 1e-6 * half_steps) {
        throw std::invalid_argument("engine: T/2 must be an integer multiple of dt");
    }
    if (!(duration >= 0.0)) throw std::invalid_argument("engine: duration must be non-negative");
    const double periods = duration / schedule.period;
    if (std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
        throw std::invalid_argument("engine: duration must be a multiple of T");
    }
    if (sample_stride < 1) throw std::invalid_argument("engine: sample_stride must be >= 1");
    if (hamiltonian) {
        if (hamiltonian->dim() != model.dim) throw std::invalid_argument("engine: Hamiltonian dimension mismatch");
        if (hermiticity_defect(*hamiltonian) > 1e-12) throw std::invalid_argument("engine: Hamiltonian not Hermitian");
    }
}

std::int64_t EngineConfig::steps_per_half() const {
    return static_cast<std::int64_t>(std::llround(schedule.period / (2.0 * dt)));
}

std::int64_t EngineConfig::total_steps() const {
    const auto periods = static_cast<std::int64_t>(std::llround(duration / schedule.period));
    return periods * 2 * steps_per_half();
}

ComplexMatrix EngineConfig::hamiltonian_or_zero() const {
    return hamiltonian ? *hamiltonian : ComplexMatrix(model.dim);
}

std::vector<double> eigen_probabilities(const SpinModel& model, const ComplexMatrix& rho, Observable o) {
    const auto& projectors = model.projectors(o);
    std::vector<double> p;
    p.reserve(projectors.size());
    for (const auto& P : projectors) p.push_back(trace_of_product(rho, P).real());
    return p;
}

namespace {

void append_sample(TrajectoryRecord& rec, const SpinModel& model, const ComplexMatrix& rho, std::int64_t step,
                   double dt) {
    rec.steps.push_back(step);
    rec.times.push_back(static_cast<double>(step) * dt);
    rec.spin_xyz.push_back(spin_expectations(model, rho));
    rec.eig_probs_z.push_back(eigen_probabilities(model, rho, Observable::Sz));
    rec.eig_probs_x.push_back(eigen_probabilities(model, rho, Observable::Sx));
    rec.coherence.push_back(coherence_from_rho(model, DensityMatrix::unchecked(rho)));
}

std::vector<ComplexMatrix> active_channels(const SpinModel& model, Observable o, double amplitude) {
    if (amplitude == 0.0) return {};
    return {measurement_operator(model, o) * Complex(amplitude)};
}

}  // namespace

StreamResult stream_trajectory(const EngineConfig& config, const DensityMatrix& initial, const SampleSink& sink) {
    config.validate();
    if (initial.dim() != config.model.dim) throw std::invalid_argument("run_trajectory: initial state dimension mismatch");

    const ComplexMatrix H = config.hamiltonian_or_zero();
    const auto z_channels = active_channels(config.model, Observable::Sz, config.schedule.a_max);
    const auto x_channels = active_channels(config.model, Observable::Sx, config.schedule.b_max);
    const Stepper z_stepper(config.stepper, H, z_channels, config.dt);
    const Stepper x_stepper(config.stepper, H, x_channels, config.dt);

    const std::int64_t total = config.total_steps();
    const std::int64_t half = config.steps_per_half();

    StreamResult out;
    StepDiagnostics& diag = out.diagnostics;
    NoiseSource noise(config.seed);
    ComplexMatrix rho = initial.mat();
    sink(0, rho);

    std::int64_t step = 0;
    try {
        for (; step < total; ++step) {
            const bool z_window = (step / half) % 2 == 0;
            (z_window ? z_stepper : x_stepper).step(rho, noise, diag);
            if ((step + 1) % config.sample_stride == 0) sink(step + 1, rho);
        }
    } catch (const StepError& e) {
        std::ostringstream os;
        os.precision(17);
        os << "trajectory aborted at t = " << static_cast<double>(step) * config.dt << " (step " << step
           << ", seed " << config.seed << "): " << e.what() << "; state = " << dump_state(rho);
        throw TrajectoryError(os.str());
    }
    out.final_state = DensityMatrix::unchecked(rho);
    return out;
}

TrajectoryRecord run_trajectory(const EngineConfig& config, const DensityMatrix& initial) {
    TrajectoryRecord rec;
    rec.spin = config.model.spin;
    rec.dt = config.dt;
    config.validate();
    rec.steps_per_half = config.steps_per_half();
    const auto expected_samples = static_cast<std::size_t>(config.total_steps() / config.sample_stride + 1);
    rec.steps.reserve(expected_samples);
    rec.times.reserve(expected_samples);
    rec.spin_xyz.reserve(expected_samples);
    rec.eig_probs_z.reserve(expected_samples);
    rec.eig_probs_x.reserve(expected_samples);
    rec.coherence.reserve(expected_samples);

    auto result = stream_trajectory(config, initial, [&](std::int64_t step, const ComplexMatrix& rho) {
        append_sample(rec, config.model, rho, step, config.dt);
    });
    rec.diagnostics = result.diagnostics;
    rec.final_state = std::move(result.final_state);
    return rec;
}

std::int64_t evolve_window(const SpinModel& model, const WindowSpec& window, ComplexMatrix& rho, NoiseSource& noise,
                           StepDiagnostics& diag, const StepObserver& observer) {
    const ComplexMatrix H(model.dim);
    const auto channels = active_channels(model, window.observable, window.amplitude);
    const Stepper stepper(window.stepper, H, channels, window.dt);
    for (std::int64_t step = 0; step < window.steps; ++step) {
        stepper.step(rho, noise, diag);
        if (observer && !observer(step + 1, rho)) return step + 1;
    }
    return window.steps;
}

}  // namespace qsd
