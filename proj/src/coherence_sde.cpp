// coherence_sde.cpp — Printed spin-1 SDEs and the term-by-term cross-check

#include "qsd/coherence_sde.hpp"

#include "qsd/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qsd {

CoherenceSdeCoefficients reference_sde_coefficients(const CoherenceVector& R, double a, double b) {
    if (R.size() != 8) throw std::invalid_argument("reference_sde_coefficients: spin-1 vector required");
    const double s = R[0], m = R[1], u = R[2], v = R[3], k = R[4], x = R[5], y = R[6], z = R[7];
    const double r2 = std::sqrt(2.0);
    const double r3 = std::sqrt(3.0);
    const double c = 2.0 * r2 / r3;  // 2√2/√3
    const double a2 = a * a;
    const double b2 = b * b;

    CoherenceSdeCoefficients o;
    // index: s=0 m=1 u=2 v=3 k=4 x=5 y=6 z=7
    o.drift[4] = -2.0 * a2 * k - 0.5 * b2 * k;
    o.diff_z[4] = a * (-2.0 / r3 * k * u - 2.0 * k * z);
    o.diff_x[4] = b * (-c * k * s - c * k * x + m / r2 + y / r2);

    o.drift[1] = -0.5 * a2 * m + b2 * (0.75 * y - 1.25 * m);
    o.diff_z[1] = -a * (2.0 / r3 * m * u - 2.0 * m * z + z * m);
    o.diff_x[1] = b * (k / r2 - c * m * s - c * m * x);

    o.drift[0] = -0.5 * a2 * s + 0.25 * b2 * (x - s);
    o.diff_z[0] = a * (-2.0 / r3 * s * u - 2.0 * s * z + s);
    o.diff_x[0] = b * (-c * s * s - c * s * x + v / r2 + r2 / r3 * z + r2 / r3);

    o.drift[2] = b2 * (-1.25 * u - 0.75 * v + r3 / 4.0 * z);
    o.diff_z[2] = a * (-2.0 / r3 * u * u - 2.0 * u * z + z * u + z / r3 + 1.0 / r3);
    o.diff_x[2] = b * (-c * s * u - c * u * x - x / r2);

    o.drift[3] = -2.0 * a2 * v + b2 * (-0.5 * v - 0.75 * u + r3 / 4.0 * z);
    o.diff_z[3] = a * (-2.0 / r3 * u * v - 2.0 * v * z);
    o.diff_x[3] = b * (c * s * v + s / r2 - c * v * x + x / r2);

    o.drift[5] = -0.5 * a2 * x + b2 * (0.25 * s - 0.25 * x);
    o.diff_z[5] = -a * (2.0 / r3 * u * x + 2.0 * x * z + x);
    o.diff_x[5] = r2 / r3 * b * (-2.0 * s * x - r3 / 2.0 * u + r3 / 2.0 * v - 2.0 * x * x - 0.5 * z + 1.0);

    o.drift[6] = -0.5 * a2 * y + b2 * (0.75 * m - 1.25 * y);
    o.diff_z[6] = a * (-2.0 / r3 * u * y - 2.0 * y * z - y);
    o.diff_x[6] = b * (k / r2 - c * s * y - c * x * y);

    o.drift[7] = b2 * (r3 / 4.0 * u + r3 / 4.0 * v - 0.75 * z);
    o.diff_z[7] = a * (-2.0 / r3 * u * z + u / r3 - 2.0 * z * z - z + 1.0);
    o.diff_x[7] = r2 / r3 * b * (-2.0 * s * z + s - 2.0 * x * z - 0.5 * x);
    return o;
}

CoherenceSdeCoefficients derived_sde_coefficients(const SpinModel& spin_one, const DensityMatrix& rho, double a,
                                                  double b) {
    if (spin_one.spin != Spin::one) throw std::invalid_argument("derived_sde_coefficients: spin-1 model required");
    const ComplexMatrix Lz = spin_one.S[2] * Complex(a);
    const ComplexMatrix Lx = spin_one.S[0] * Complex(b);
    const std::array<ComplexMatrix, 2> channels{Lz, Lx};
    const ComplexMatrix zero(3);

    const ComplexMatrix drift = lindblad_generator(rho.mat(), zero, channels);
    const ComplexMatrix noise_z = diffusion_term(rho.mat(), Lz);
    const ComplexMatrix noise_x = diffusion_term(rho.mat(), Lx);

    const double half_root3 = 0.5 * std::sqrt(3.0);
    CoherenceSdeCoefficients o;
    const auto& lambda = gell_mann_basis();
    for (std::size_t i = 0; i < 8; ++i) {
        o.drift[i] = half_root3 * trace_of_product(drift, lambda[i]).real();
        o.diff_z[i] = half_root3 * trace_of_product(noise_z, lambda[i]).real();
        o.diff_x[i] = half_root3 * trace_of_product(noise_x, lambda[i]).real();
    }
    return o;
}

bool is_known_suspect(const std::string& component, const std::string& term) {
    return term == "dWz" && (component == "m" || component == "u");
}

const CoherenceSdeTermReport& CoherenceSdeReport::find(const std::string& component, const std::string& term) const {
    for (const auto& t : terms)
        if (t.component == component && t.term == term) return t;
    throw std::out_of_range("CoherenceSdeReport: no entry for d" + component + " " + term);
}

bool CoherenceSdeReport::component_matches(const std::string& component) const {
    return find(component, "drift").matches && find(component, "dWz").matches && find(component, "dWx").matches;
}

CoherenceSdeReport validate_coherence_sde(int samples, std::uint64_t seed, double tolerance) {
    const SpinModel model = build_model(Spin::one);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coupling(0.1, 2.0);

    std::array<std::array<double, 3>, 8> worst{};
    for (int n = 0; n < samples; ++n) {
        const DensityMatrix rho = random_state(3, rng);
        const double a = coupling(rng);
        const double b = coupling(rng);
        const auto printed = reference_sde_coefficients(coherence_from_rho(model, rho), a, b);
        const auto derived = derived_sde_coefficients(model, rho, a, b);
        for (std::size_t i = 0; i < 8; ++i) {
            worst[i][0] = std::max(worst[i][0], std::abs(printed.drift[i] - derived.drift[i]));
            worst[i][1] = std::max(worst[i][1], std::abs(printed.diff_z[i] - derived.diff_z[i]));
            worst[i][2] = std::max(worst[i][2], std::abs(printed.diff_x[i] - derived.diff_x[i]));
        }
    }

    CoherenceSdeReport report;
    report.samples = samples;
    report.tolerance = tolerance;
    const std::array<const char*, 3> term_names{"drift", "dWz", "dWx"};
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t t = 0; t < 3; ++t) {
            CoherenceSdeTermReport r;
            r.component = kCoherenceNames[i];
            r.term = term_names[t];
            r.max_deviation = worst[i][t];
            r.matches = worst[i][t] <= tolerance;
            r.known_suspect = is_known_suspect(r.component, r.term);
            report.terms.push_back(r);
        }
    }
    return report;
}

}  // namespace qsd
