// matrix.cpp — Small complex matrix algebra and Hermitian eigen-solvers

#include "qsd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsd {

namespace {

void require_dim(int dim) {
    if (dim != 2 && dim != 3) {
        throw std::invalid_argument("ComplexMatrix: dimension must be 2 or 3, got " + std::to_string(dim));
    }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()) + ")");
    }
}

// Rotate v so that its first non-negligible component is real and positive.
void fix_phase(std::vector<Complex>& v) {
    for (auto& c : v) {
        const double mag = std::abs(c);
        if (mag > 1e-12) {
            const Complex rot = std::conj(c) / mag;
            for (auto& x : v) x *= rot;
            c = Complex(mag, 0.0);
            return;
        }
    }
}

void normalize(std::vector<Complex>& v) {
    double n2 = 0.0;
    for (const auto& c : v) n2 += std::norm(c);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : v) c *= inv;
}

HermitianSpectrum eigen2(const ComplexMatrix& a) {
    const double a00 = a(0, 0).real();
    const double a11 = a(1, 1).real();
    const Complex b = 0.5 * (a(0, 1) + std::conj(a(1, 0)));

    std::vector<double> vals(2);
    std::vector<std::vector<Complex>> vecs(2);
    if (std::abs(b) == 0.0) {
        // Already diagonal: ascending order, ties keep the basis order.
        if (a00 <= a11) {
            vals = {a00, a11};
            vecs = {{1.0, 0.0}, {0.0, 1.0}};
        } else {
            vals = {a11, a00};
            vecs = {{0.0, 1.0}, {1.0, 0.0}};
        }
    } else {
        const double mean = 0.5 * (a00 + a11);
        const double radius = std::hypot(0.5 * (a00 - a11), std::abs(b));
        vals = {mean - radius, mean + radius};
        for (int k = 0; k < 2; ++k) {
            const double lam = vals[static_cast<std::size_t>(k)];
            // Two equivalent null vectors of (A - lam); keep the better conditioned one.
            std::vector<Complex> r0{b, Complex(lam - a00, 0.0)};
            std::vector<Complex> r1{Complex(lam - a11, 0.0), std::conj(b)};
            const double n0 = std::norm(r0[0]) + std::norm(r0[1]);
            const double n1 = std::norm(r1[0]) + std::norm(r1[1]);
            vecs[static_cast<std::size_t>(k)] = n0 >= n1 ? r0 : r1;
        }
    }

    HermitianSpectrum out;
    out.eigenvalues = vals;
    out.eigenvectors = ComplexMatrix(2);
    for (int k = 0; k < 2; ++k) {
        auto& v = vecs[static_cast<std::size_t>(k)];
        normalize(v);
        fix_phase(v);
        for (int r = 0; r < 2; ++r) out.eigenvectors(r, k) = v[static_cast<std::size_t>(r)];
    }
    return out;
}

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

HermitianSpectrum eigen3(const ComplexMatrix& input) {
    constexpr double kTolerance = 1e-13;
    constexpr int kMaxSweeps = 64;
    constexpr int n = 3;

    ComplexMatrix a = hermitian_part(input);
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(1.0, max_abs(a));

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > kTolerance * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double g = std::abs(apq);
                if (g <= 1e-300) continue;
                const Complex u = apq / g;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                ComplexMatrix j = ComplexMatrix::identity(n);
                j(p, p) = c;
                j(p, q) = s;
                j(q, p) = -s * std::conj(u);
                j(q, q) = c * std::conj(u);

                a = hermitian_part(dagger(j) * a * j);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                v = v * j;
            }
        }
    }

    std::vector<std::vector<Complex>> vecs(n, std::vector<Complex>(n));
    std::vector<double> vals(n);
    for (int k = 0; k < n; ++k) {
        vals[static_cast<std::size_t>(k)] = a(k, k).real();
        for (int r = 0; r < n; ++r) vecs[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = v(r, k);
        normalize(vecs[static_cast<std::size_t>(k)]);
        fix_phase(vecs[static_cast<std::size_t>(k)]);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
        const double vl = vals[static_cast<std::size_t>(l)];
        const double vr = vals[static_cast<std::size_t>(r)];
        if (std::abs(vl - vr) > 1e-12) return vl < vr;
        // Degenerate pair: order by component magnitudes, largest leading component first.
        const auto& a_vec = vecs[static_cast<std::size_t>(l)];
        const auto& b_vec = vecs[static_cast<std::size_t>(r)];
        for (int i = 0; i < n; ++i) {
            const double ma = std::abs(a_vec[static_cast<std::size_t>(i)]);
            const double mb = std::abs(b_vec[static_cast<std::size_t>(i)]);
            if (std::abs(ma - mb) > 1e-12) return ma > mb;
        }
        return false;
    });

    HermitianSpectrum out;
    out.eigenvectors = ComplexMatrix(n);
    for (int k = 0; k < n; ++k) {
        const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
        out.eigenvalues.push_back(vals[src]);
        for (int r = 0; r < n; ++r) out.eigenvectors(r, k) = vecs[src][static_cast<std::size_t>(r)];
    }
    return out;
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix::ComplexMatrix(int dim, std::initializer_list<Complex> row_major) : dim_(dim) {
    require_dim(dim);
    if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
        throw std::invalid_argument("ComplexMatrix: expected " + std::to_string(dim * dim) + " entries, got " +
                                    std::to_string(row_major.size()));
    }
    auto it = row_major.begin();
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) (*this)(r, c) = *it++;
    if (!is_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    ComplexMatrix m(static_cast<int>(diag.size()));
    for (int i = 0; i < m.dim(); ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v) {
    ComplexMatrix m(static_cast<int>(v.size()));
    for (int r = 0; r < m.dim(); ++r)
        for (int c = 0; c < m.dim(); ++c) m(r, c) = v[static_cast<std::size_t>(r)] * std::conj(v[static_cast<std::size_t>(c)]);
    return m;
}

bool ComplexMatrix::is_finite() const noexcept {
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c)
            if (!std::isfinite((*this)(r, c).real()) || !std::isfinite((*this)(r, c).imag())) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator+=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator-=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) noexcept {
    for (auto& x : a_) x *= s;
    return *this;
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) noexcept {
    return a.dim_ == b.dim_ && a.a_ == b.a_;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "matmul");
    const int n = a.dim();
    ComplexMatrix out(n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            const Complex ark = a(r, k);
            for (int c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
    ComplexMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) out(r, c) = std::conj(a(c, r));
    return out;
}

Complex trace(const ComplexMatrix& a) noexcept {
    Complex t = 0.0;
    for (int i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "trace_of_product");
    Complex t = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int k = 0; k < a.dim(); ++k) t += a(r, k) * b(k, r);
    return t;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

double max_abs(const ComplexMatrix& a) noexcept {
    double m = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c)));
    return m;
}

double hermiticity_defect(const ComplexMatrix& a) noexcept {
    double m = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = r; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - std::conj(a(c, r))));
    return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) noexcept {
    ComplexMatrix out = a;
    for (int r = 0; r < a.dim(); ++r) {
        out(r, r) = Complex(a(r, r).real(), 0.0);
        for (int c = r + 1; c < a.dim(); ++c) {
            const Complex v = 0.5 * (a(r, c) + std::conj(a(c, r)));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

std::vector<Complex> HermitianSpectrum::vector(int k) const {
    std::vector<Complex> v(static_cast<std::size_t>(eigenvectors.dim()));
    for (int r = 0; r < eigenvectors.dim(); ++r) v[static_cast<std::size_t>(r)] = eigenvectors(r, k);
    return v;
}

ComplexMatrix HermitianSpectrum::projector(int k) const {
    const auto v = vector(k);
    return ComplexMatrix::outer(v);
}

ComplexMatrix HermitianSpectrum::reconstruct() const {
    ComplexMatrix out(eigenvectors.dim());
    for (int k = 0; k < eigenvectors.dim(); ++k) out += projector(k) * Complex(eigenvalues[static_cast<std::size_t>(k)]);
    return out;
}

HermitianSpectrum hermitian_eigen(const ComplexMatrix& a) {
    if (hermiticity_defect(a) > 1e-10) {
        throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian (defect " +
                                    std::to_string(hermiticity_defect(a)) + ")");
    }
    return a.dim() == 2 ? eigen2(a) : eigen3(a);
}

std::array<double, 3> hermitian_eigenvalues(const ComplexMatrix& a) {
    if (a.dim() == 2) {
        const double a00 = a(0, 0).real();
        const double a11 = a(1, 1).real();
        const double mean = 0.5 * (a00 + a11);
        const double radius = std::hypot(0.5 * (a00 - a11), std::abs(a(0, 1)));
        return {mean - radius, mean + radius, 0.0};
    }

    // Trigonometric solution of the characteristic cubic.
    const double a00 = a(0, 0).real();
    const double a11 = a(1, 1).real();
    const double a22 = a(2, 2).real();
    const double off = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
    const double q = (a00 + a11 + a22) / 3.0;
    const double d0 = a00 - q;
    const double d1 = a11 - q;
    const double d2 = a22 - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off;
    if (p2 <= 0.0) return {q, q, q};
    const double p = std::sqrt(p2 / 6.0);

    // det(A - qI) for the Hermitian matrix
    const Complex b01 = a(0, 1);
    const Complex b02 = a(0, 2);
    const Complex b12 = a(1, 2);
    const double det = d0 * d1 * d2 + 2.0 * (b01 * b12 * std::conj(b02)).real() - d0 * std::norm(b12) -
                       d1 * std::norm(b02) - d2 * std::norm(b01);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double largest = q + 2.0 * p * std::cos(phi);
    const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double middle = 3.0 * q - largest - smallest;
    return {smallest, middle, largest};
}

double min_eigenvalue(const ComplexMatrix& a) { return hermitian_eigenvalues(a)[0]; }

}  // namespace qsd
