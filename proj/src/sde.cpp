// sde.cpp — Drift and diffusion terms of the state-diffusion equation

#include "qsd/sde.hpp"

namespace qsd {

ComplexMatrix dissipator(const ComplexMatrix& rho, const ComplexMatrix& L) {
    const ComplexMatrix Ld = dagger(L);
    const ComplexMatrix LdL = Ld * L;
    return L * rho * Ld - 0.5 * (LdL * rho + rho * LdL);
}

ComplexMatrix diffusion_term(const ComplexMatrix& rho, const ComplexMatrix& L) {
    const ComplexMatrix Ld = dagger(L);
    const Complex expectation = trace(rho * (L + Ld));
    return rho * Ld + L * rho - expectation * rho;
}

ComplexMatrix lindblad_generator(const ComplexMatrix& rho, const ComplexMatrix& H,
                                 std::span<const ComplexMatrix> channels) {
    ComplexMatrix out = Complex(0.0, -1.0) * commutator(H, rho);
    for (const auto& L : channels) out += dissipator(rho, L);
    return out;
}

}  // namespace qsd
