// spin_model.cpp — Spin operators, parametrizations and preset states

#include "qsd/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsd {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

// Eigenvectors of a spin operator, reordered so eigenvalues descend.
std::vector<std::vector<Complex>> descending_eigenvectors(const ComplexMatrix& op) {
    const HermitianSpectrum spec = hermitian_eigen(op);
    std::vector<std::vector<Complex>> out;
    for (int k = op.dim() - 1; k >= 0; --k) out.push_back(spec.vector(k));
    return out;
}

}  // namespace

std::string to_string(Spin s) { return s == Spin::half ? "spin_half" : "spin_one"; }
std::string to_string(Observable o) { return o == Observable::Sz ? "Sz" : "Sx"; }

int SpinModel::label_index(int label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw std::invalid_argument("eigenvalue label " + std::to_string(label) + " does not exist for " +
                                    to_string(spin));
    }
    return static_cast<int>(it - labels.begin());
}

SpinModel build_model(Spin spin) {
    SpinModel m;
    m.spin = spin;
    if (spin == Spin::half) {
        m.dim = 2;
        m.S[0] = ComplexMatrix(2, {0.0, 0.5, 0.5, 0.0});
        m.S[1] = ComplexMatrix(2, {0.0, Complex(0.0, -0.5), Complex(0.0, 0.5), 0.0});
        m.S[2] = ComplexMatrix(2, {0.5, 0.0, 0.0, -0.5});
        m.labels = {+1, -1};
    } else {
        const double h = 1.0 / kSqrt2;
        m.dim = 3;
        m.S[0] = ComplexMatrix(3, {0.0, h, 0.0, h, 0.0, h, 0.0, h, 0.0});
        m.S[1] = ComplexMatrix(3, {0.0, Complex(0.0, -h), 0.0, Complex(0.0, h), 0.0, Complex(0.0, -h), 0.0,
                                   Complex(0.0, h), 0.0});
        m.S[2] = ComplexMatrix(3, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0});
        m.labels = {+1, 0, -1};
    }
    m.eigvecs_z = descending_eigenvectors(m.S[2]);
    m.eigvecs_x = descending_eigenvectors(m.S[0]);
    for (const auto& v : m.eigvecs_z) m.projectors_z.push_back(ComplexMatrix::outer(v));
    for (const auto& v : m.eigvecs_x) m.projectors_x.push_back(ComplexMatrix::outer(v));
    return m;
}

ComplexMatrix measurement_operator(const SpinModel& model, Observable o) {
    const ComplexMatrix& s = model.spin_operator(o);
    return model.spin == Spin::half ? s * Complex(2.0) : s;
}

const std::array<ComplexMatrix, 8>& gell_mann_basis() {
    static const std::array<ComplexMatrix, 8> basis = [] {
        const Complex i = kI;
        const double r = 1.0 / kSqrt3;
        return std::array<ComplexMatrix, 8>{
            ComplexMatrix(3, {0, 1, 0, 1, 0, 0, 0, 0, 0}),
            ComplexMatrix(3, {0, -i, 0, i, 0, 0, 0, 0, 0}),
            ComplexMatrix(3, {1, 0, 0, 0, -1, 0, 0, 0, 0}),
            ComplexMatrix(3, {0, 0, 1, 0, 0, 0, 1, 0, 0}),
            ComplexMatrix(3, {0, 0, -i, 0, 0, 0, i, 0, 0}),
            ComplexMatrix(3, {0, 0, 0, 0, 0, 1, 0, 1, 0}),
            ComplexMatrix(3, {0, 0, 0, 0, 0, -i, 0, i, 0}),
            ComplexMatrix(3, {r, 0, 0, 0, r, 0, 0, 0, -2.0 * r}),
        };
    }();
    return basis;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(m) {
    if (!m_.is_finite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
    const StateDefects d = state_defects(m_);
    if (d.hermiticity > 1e-12) {
        throw std::invalid_argument("DensityMatrix: not Hermitian (defect " + std::to_string(d.hermiticity) + ")");
    }
    if (d.trace_error > 1e-12) {
        throw std::invalid_argument("DensityMatrix: trace differs from 1 by " + std::to_string(d.trace_error));
    }
    if (d.min_eigenvalue < -1e-10) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(d.min_eigenvalue));
    }
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) noexcept {
    DensityMatrix d;
    d.m_ = m;
    return d;
}

StateDefects state_defects(const ComplexMatrix& rho) {
    StateDefects d;
    d.trace_error = std::abs(trace(rho) - 1.0);
    d.hermiticity = hermiticity_defect(rho);
    d.min_eigenvalue = hermitian_eigen(hermitian_part(rho)).eigenvalues.front();
    return d;
}

DensityMatrix rho_from_coherence(const SpinModel& model, const CoherenceVector& c) {
    if (model.spin == Spin::half) {
        if (c.size() != 3) throw std::invalid_argument("rho_from_coherence: spin-1/2 needs 3 components");
        const double rx = c[0], ry = c[1], rz = c[2];
        ComplexMatrix m(2);
        m(0, 0) = 0.5 * (1.0 + rz);
        m(0, 1) = Complex(0.5 * rx, -0.5 * ry);
        m(1, 0) = Complex(0.5 * rx, 0.5 * ry);
        m(1, 1) = 1.0 - m(0, 0).real();
        return DensityMatrix::unchecked(m);
    }
    if (c.size() != 8) throw std::invalid_argument("rho_from_coherence: spin-1 needs 8 components");
    const double s = c[0], mm = c[1], u = c[2], v = c[3], k = c[4], x = c[5], y = c[6], z = c[7];
    const double t = kSqrt3;
    ComplexMatrix m(3);
    m(0, 0) = (1.0 + t * u + z) / 3.0;
    m(0, 1) = Complex(t * s, -t * mm) / 3.0;
    m(0, 2) = Complex(t * v, -t * k) / 3.0;
    m(1, 0) = Complex(t * s, t * mm) / 3.0;
    m(1, 1) = (1.0 - t * u + z) / 3.0;
    m(1, 2) = Complex(t * x, -t * y) / 3.0;
    m(2, 0) = Complex(t * v, t * k) / 3.0;
    m(2, 1) = Complex(t * x, t * y) / 3.0;
    m(2, 2) = 1.0 - m(0, 0).real() - m(1, 1).real();
    return DensityMatrix::unchecked(m);
}

CoherenceVector coherence_from_rho(const SpinModel& model, const DensityMatrix& rho) {
    const ComplexMatrix& m = rho.mat();
    CoherenceVector out;
    if (model.spin == Spin::half) {
        out.components = {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
        return out;
    }
    out.components.reserve(8);
    for (const auto& lam : gell_mann_basis()) out.components.push_back(0.5 * kSqrt3 * trace_of_product(m, lam).real());
    return out;
}

std::array<double, 3> spin_expectations(const SpinModel& model, const ComplexMatrix& rho) {
    return {trace_of_product(rho, model.S[0]).real(), trace_of_product(rho, model.S[1]).real(),
            trace_of_product(rho, model.S[2]).real()};
}

std::array<double, 3> spin_expectations(const SpinModel& model, const DensityMatrix& rho) {
    return spin_expectations(model, rho.mat());
}

std::array<double, 3> spin_components_from_coherence(const CoherenceVector& R) {
    if (R.size() != 8) throw std::invalid_argument("spin_components_from_coherence: spin-1 vector required");
    const double f = std::sqrt(2.0 / 3.0);
    return {f * (R[5] + R[0]), f * (R[1] + R[6]), R[2] / kSqrt3 + R[7]};
}

Preset parse_preset(std::string_view name) {
    auto parse_label = [&](std::string_view token) -> int {
        if (token == "+1" || token == "1") return 1;
        if (token == "0") return 0;
        if (token == "-1") return -1;
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    };
    if (name == "mixed_start") return {};
    const auto open = name.find('(');
    const auto close = name.rfind(')');
    if (open == std::string_view::npos || close != name.size() - 1) {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    const std::string_view head = name.substr(0, open);
    const std::string_view args = name.substr(open + 1, close - open - 1);
    Preset p;
    if (head == "eig_z" || head == "eig_x") {
        p.kind = head == "eig_z" ? Preset::Kind::eig_z : Preset::Kind::eig_x;
        p.label = parse_label(args);
        return p;
    }
    if (head == "superpos_z") {
        const auto comma = args.find(',');
        if (comma == std::string_view::npos) throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
        p.kind = Preset::Kind::superpos_z;
        p.label = parse_label(args.substr(0, comma));
        p.second_label = parse_label(args.substr(comma + 1));
        if (p.label == p.second_label) throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
        return p;
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::string to_string(const Preset& p) {
    auto lab = [](int l) { return l > 0 ? std::string("+1") : std::to_string(l); };
    switch (p.kind) {
        case Preset::Kind::mixed_start: return "mixed_start";
        case Preset::Kind::eig_z: return "eig_z(" + lab(p.label) + ")";
        case Preset::Kind::eig_x: return "eig_x(" + lab(p.label) + ")";
        case Preset::Kind::superpos_z: return "superpos_z(" + lab(p.label) + "," + lab(p.second_label) + ")";
    }
    return "?";
}

DensityMatrix preset_state(const SpinModel& model, const Preset& preset) {
    switch (preset.kind) {
        case Preset::Kind::mixed_start: {
            ComplexMatrix m = ComplexMatrix::identity(model.dim);
            m *= 1.0 / model.dim;
            return DensityMatrix(m);
        }
        case Preset::Kind::eig_z:
            return DensityMatrix(model.projectors_z[static_cast<std::size_t>(model.label_index(preset.label))]);
        case Preset::Kind::eig_x:
            return DensityMatrix(model.projectors_x[static_cast<std::size_t>(model.label_index(preset.label))]);
        case Preset::Kind::superpos_z: {
            const auto& a = model.eigvecs_z[static_cast<std::size_t>(model.label_index(preset.label))];
            const auto& b = model.eigvecs_z[static_cast<std::size_t>(model.label_index(preset.second_label))];
            std::vector<Complex> v(a.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = (a[i] + b[i]) / kSqrt2;
            return DensityMatrix(hermitian_part(ComplexMatrix::outer(v)));
        }
    }
    throw std::invalid_argument("unknown preset");
}

DensityMatrix preset_state(const SpinModel& model, std::string_view name) {
    return preset_state(model, parse_preset(name));
}

DensityMatrix random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    ComplexMatrix g(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
    ComplexMatrix rho = hermitian_part(g * dagger(g));
    rho *= 1.0 / trace(rho).real();
    return DensityMatrix(rho);
}

DensityMatrix random_pure_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::vector<Complex> v(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    for (auto& c : v) {
        c = Complex(gauss(rng), gauss(rng));
        n2 += std::norm(c);
    }
    for (auto& c : v) c /= std::sqrt(n2);
    return DensityMatrix(hermitian_part(ComplexMatrix::outer(v)));
}

}  // namespace qsd
