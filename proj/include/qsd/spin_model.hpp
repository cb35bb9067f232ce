// spin_model.hpp — Spin-1/2 and spin-1 systems: operators, Gell-Mann basis,
// coherence-vector parametrizations, eigenprojectors and preset states.

#pragma once

#include "qsd/matrix.hpp"

#include <array>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qsd {

enum class Spin { half, one };
enum class Observable { Sz, Sx };

std::string to_string(Spin s);
std::string to_string(Observable o);

struct SpinModel {
    Spin spin = Spin::one;
    int dim = 3;
    std::array<ComplexMatrix, 3> S;             // S_x, S_y, S_z (ħ = 1)
    std::vector<ComplexMatrix> projectors_z;    // eigenvalue descending: +1 [, 0], -1
    std::vector<ComplexMatrix> projectors_x;
    std::vector<std::vector<Complex>> eigvecs_z;  // same order, phase-fixed
    std::vector<std::vector<Complex>> eigvecs_x;
    std::vector<int> labels;                    // (+1, 0, -1) or (+1, -1)

    const ComplexMatrix& spin_operator(Observable o) const { return o == Observable::Sz ? S[2] : S[0]; }
    const std::vector<ComplexMatrix>& projectors(Observable o) const {
        return o == Observable::Sz ? projectors_z : projectors_x;
    }
    const std::vector<std::vector<Complex>>& eigenvectors(Observable o) const {
        return o == Observable::Sz ? eigvecs_z : eigvecs_x;
    }
    // Position of an eigenvalue label in the projector lists; throws if absent.
    int label_index(int label) const;
};

SpinModel build_model(Spin spin);

// Operator O such that the measurement channel is L = g(t)·O. Spin-1/2 uses the
// Pauli matrix (σ_z, σ_x), spin-1 the spin matrix (S_z, S_x).
ComplexMatrix measurement_operator(const SpinModel& model, Observable o);

// λ_1 … λ_8.
const std::array<ComplexMatrix, 8>& gell_mann_basis();

// Density matrix with validated invariants: Hermitian and unit trace to 1e-12,
// smallest eigenvalue ≥ -1e-10.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(ComplexMatrix m);

    // Skips validation; for states produced by the steppers.
    static DensityMatrix unchecked(ComplexMatrix m) noexcept;

    const ComplexMatrix& mat() const noexcept { return m_; }
    int dim() const noexcept { return m_.dim(); }

private:
    ComplexMatrix m_;
};

struct StateDefects {
    double trace_error = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
};

// Uses the Jacobi eigen-solver for the spectrum.
StateDefects state_defects(const ComplexMatrix& rho);

// Spin-1/2: (r_x, r_y, r_z). Spin-1: R = (s, m, u, v, k, x, y, z).
struct CoherenceVector {
    std::vector<double> components;

    std::size_t size() const noexcept { return components.size(); }
    double operator[](std::size_t i) const { return components[i]; }
};

// ρ = ½(I + r·σ) or ρ = ⅓(I + √3 R·λ); the last diagonal entry is set so the
// trace is exactly one.
DensityMatrix rho_from_coherence(const SpinModel& model, const CoherenceVector& c);
CoherenceVector coherence_from_rho(const SpinModel& model, const DensityMatrix& rho);

std::array<double, 3> spin_expectations(const SpinModel& model, const DensityMatrix& rho);
std::array<double, 3> spin_expectations(const SpinModel& model, const ComplexMatrix& rho);
// Spin-1 components as linear combinations of R: √(2/3)(x+s), √(2/3)(m+y), u/√3 + z.
std::array<double, 3> spin_components_from_coherence(const CoherenceVector& R);

struct Preset {
    enum class Kind { mixed_start, eig_z, eig_x, superpos_z };
    Kind kind = Kind::mixed_start;
    int label = 0;          // eigenvalue label for eig_z / eig_x
    int second_label = 0;   // superpos_z only
};

// Accepts "mixed_start", "eig_z(+1)", "eig_z(0)", "eig_x(-1)", "superpos_z(-1,0)", ...
Preset parse_preset(std::string_view name);
std::string to_string(const Preset& p);

// Throws std::invalid_argument when the preset does not exist for the model.
DensityMatrix preset_state(const SpinModel& model, const Preset& preset);
DensityMatrix preset_state(const SpinModel& model, std::string_view name);

// Random full-rank state from a complex Ginibre matrix (ρ = G G† / Tr).
DensityMatrix random_state(int dim, std::mt19937_64& rng);
// Random pure state with Gaussian amplitudes.
DensityMatrix random_pure_state(int dim, std::mt19937_64& rng);

}  // namespace qsd
