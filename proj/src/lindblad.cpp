// lindblad.cpp — Superoperator exponential via Eigen

#include "qsd/lindblad.hpp"

#include "qsd/sde.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

namespace qsd {

DensityMatrix lindblad_propagate(const DensityMatrix& rho0, const ComplexMatrix& H,
                                 std::span<const ComplexMatrix> channels, double t) {
    const int d = rho0.dim();
    if (t < 0.0) throw std::invalid_argument("lindblad_propagate: negative time");
    if (H.dim() != d) throw std::invalid_argument("lindblad_propagate: Hamiltonian dimension mismatch");
    for (const auto& L : channels)
        if (L.dim() != d) throw std::invalid_argument("lindblad_propagate: channel dimension mismatch");
    if (t == 0.0) return rho0;

    const int n = d * d;
    Eigen::MatrixXcd generator(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexMatrix basis(d);
        basis(j / d, j % d) = 1.0;
        const ComplexMatrix image = lindblad_generator(basis, H, channels);
        for (int i = 0; i < n; ++i) generator(i, j) = image(i / d, i % d);
    }
    const Eigen::MatrixXcd propagator = (generator * t).exp();

    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rho0.mat()(i / d, i % d);
    const Eigen::VectorXcd out = propagator * v;

    ComplexMatrix rho(d);
    for (int i = 0; i < n; ++i) rho(i / d, i % d) = out(i);
    rho = hermitian_part(rho);
    rho *= 1.0 / trace(rho).real();
    return DensityMatrix::unchecked(rho);
}

}  // namespace qsd
