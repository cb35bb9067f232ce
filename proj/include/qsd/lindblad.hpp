// lindblad.hpp — Exact propagation of the ensemble-mean master equation
//
// The generator ρ ↦ -i[H, ρ] + Σ_k D[L_k]ρ is assembled as a dim² × dim²
// superoperator on row-major vec(ρ) and exponentiated.

#pragma once

#include "qsd/matrix.hpp"
#include "qsd/spin_model.hpp"

#include <span>

namespace qsd {

// ρ(t) for time-independent H and channels. Throws for t < 0 or mismatched
// dimensions.
DensityMatrix lindblad_propagate(const DensityMatrix& rho0, const ComplexMatrix& H,
                                 std::span<const ComplexMatrix> channels, double t);

}  // namespace qsd
