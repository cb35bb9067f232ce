// coherence_sde.hpp — Reference spin-1 coherence-vector SDEs and their numerical
// cross-check against the general state-diffusion equation.
//
// The reference per-component equations are a validation target only; the
// engine never integrates them.

#pragma once

#include "qsd/spin_model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qsd {

// Coefficients of dt, dW_z and dW_x for each of (s, m, u, v, k, x, y, z).
struct CoherenceSdeCoefficients {
    std::array<double, 8> drift{};
    std::array<double, 8> diff_z{};
    std::array<double, 8> diff_x{};
};

inline constexpr std::array<const char*, 8> kCoherenceNames{"s", "m", "u", "v", "k", "x", "y", "z"};

// Literal evaluation of the reference expressions (including their typos).
CoherenceSdeCoefficients reference_sde_coefficients(const CoherenceVector& R, double a, double b);

// Same coefficients derived from the general equation with L_z = a S_z and
// L_x = b S_x, projected with dR_i = (√3/2) Tr(dρ λ_i) term by term.
CoherenceSdeCoefficients derived_sde_coefficients(const SpinModel& spin_one, const DensityMatrix& rho, double a,
                                                  double b);

struct CoherenceSdeTermReport {
    std::string component;   // "s", "m", ...
    std::string term;        // "drift", "dWz", "dWx"
    double max_deviation = 0.0;
    bool matches = false;    // max_deviation ≤ tolerance
    bool known_suspect = false;
};

struct CoherenceSdeReport {
    int samples = 0;
    double tolerance = 1e-10;
    std::vector<CoherenceSdeTermReport> terms;  // 8 components × 3 terms

    const CoherenceSdeTermReport& find(const std::string& component, const std::string& term) const;
    bool component_matches(const std::string& component) const;
};

// Terms whose printed form is known to be irregular: "+zm" in dm and "+zu" in du.
bool is_known_suspect(const std::string& component, const std::string& term);

// Random full-rank states and random couplings a, b ∈ [0.1, 2].
CoherenceSdeReport validate_coherence_sde(int samples, std::uint64_t seed, double tolerance = 1e-10);

}  // namespace qsd
