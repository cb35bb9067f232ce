// sde.hpp — Coefficients of the diffusive stochastic master equation
//
//   dρ = -i[H, ρ] dt + Σ_k ( D[L_k]ρ dt + N[L_k]ρ dW_k )
//   D[L]ρ = L ρ L† - ½{L†L, ρ}
//   N[L]ρ = ρ L† + L ρ - Tr[ρ (L + L†)] ρ

#pragma once

#include "qsd/matrix.hpp"

#include <span>

namespace qsd {

ComplexMatrix dissipator(const ComplexMatrix& rho, const ComplexMatrix& L);

ComplexMatrix diffusion_term(const ComplexMatrix& rho, const ComplexMatrix& L);

// Deterministic part: -i[H, ρ] + Σ_k D[L_k]ρ. This is also the Lindblad
// generator of the ensemble mean.
ComplexMatrix lindblad_generator(const ComplexMatrix& rho, const ComplexMatrix& H,
                                 std::span<const ComplexMatrix> channels);

}  // namespace qsd
