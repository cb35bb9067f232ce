// matrix.hpp — Small fixed-capacity complex matrices (dimension 2 or 3)
//
// Everything in the simulator lives in a 2- or 3-dimensional Hilbert space, so
// matrices are stored inline (no heap) and all operations are plain loops.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qsd {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

class ComplexMatrix {
public:
    static constexpr int kMaxDim = 3;

    ComplexMatrix() = default;

    // Zero matrix. Throws std::invalid_argument unless dim is 2 or 3.
    explicit ComplexMatrix(int dim);

    // Row-major entries; throws on a size mismatch or non-finite entry.
    ComplexMatrix(int dim, std::initializer_list<Complex> row_major);

    static ComplexMatrix identity(int dim);
    static ComplexMatrix diagonal(std::span<const double> diag);
    // |v><v| for a (not necessarily normalized) column vector.
    static ComplexMatrix outer(std::span<const Complex> v);

    int dim() const noexcept { return dim_; }

    Complex& operator()(int r, int c) noexcept { return a_[static_cast<std::size_t>(r * kMaxDim + c)]; }
    const Complex& operator()(int r, int c) const noexcept {
        return a_[static_cast<std::size_t>(r * kMaxDim + c)];
    }

    bool is_finite() const noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s) noexcept;

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) noexcept;

private:
    int dim_ = 0;
    std::array<Complex, kMaxDim * kMaxDim> a_{};
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

// Exact product; throws std::invalid_argument on dimension mismatch.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& a);
Complex trace(const ComplexMatrix& a) noexcept;
// Tr(a b) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest |a_ij|.
double max_abs(const ComplexMatrix& a) noexcept;
// max |a - a†|
double hermiticity_defect(const ComplexMatrix& a) noexcept;
// (a + a†)/2
ComplexMatrix hermitian_part(const ComplexMatrix& a) noexcept;

struct HermitianSpectrum {
    std::vector<double> eigenvalues;   // ascending
    ComplexMatrix eigenvectors;        // orthonormal columns, same order

    std::vector<Complex> vector(int k) const;
    ComplexMatrix projector(int k) const;
    ComplexMatrix reconstruct() const;
};

// Eigen-decomposition of a Hermitian matrix: closed form for 2x2, cyclic Jacobi
// sweeps for 3x3. Eigenvalues ascend; each eigenvector has its first
// non-negligible component real and positive. Throws std::invalid_argument when
// ||a - a†||_max > 1e-10.
HermitianSpectrum hermitian_eigen(const ComplexMatrix& a);

// Eigenvalues only (ascending), closed form in both dimensions. Used on hot paths
// where only the spectrum matters (positivity diagnostics).
std::array<double, 3> hermitian_eigenvalues(const ComplexMatrix& a);
double min_eigenvalue(const ComplexMatrix& a);

}  // namespace qsd
