// test_spin_model.cpp — spin operators, Gell-Mann basis, coherence vectors, presets

#include "qsd/spin_model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qsd;

namespace {

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs(a - b); }

const Complex I{0.0, 1.0};

}  // namespace

TEST_CASE("spin operators satisfy the angular momentum algebra") {
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        const double j = spin == Spin::half ? 0.5 : 1.0;
        CHECK(max_diff(commutator(m.S[0], m.S[1]), I * m.S[2]) < 1e-14);
        CHECK(max_diff(commutator(m.S[1], m.S[2]), I * m.S[0]) < 1e-14);
        CHECK(max_diff(commutator(m.S[2], m.S[0]), I * m.S[1]) < 1e-14);
        const ComplexMatrix casimir = m.S[0] * m.S[0] + m.S[1] * m.S[1] + m.S[2] * m.S[2];
        CHECK(max_diff(casimir, ComplexMatrix::identity(m.dim) * Complex(j * (j + 1))) < 1e-14);
    }
}

TEST_CASE("eigenprojectors are complete, idempotent and carry their labels") {
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        for (Observable o : {Observable::Sz, Observable::Sx}) {
            const auto& P = m.projectors(o);
            REQUIRE(P.size() == m.labels.size());
            ComplexMatrix sum(m.dim);
            for (std::size_t k = 0; k < P.size(); ++k) {
                sum = sum + P[k];
                CHECK(max_diff(P[k] * P[k], P[k]) < 1e-14);
                const double lambda = spin == Spin::half ? 0.5 * m.labels[k] : m.labels[k];
                CHECK(max_diff(m.spin_operator(o) * P[k], P[k] * Complex(lambda)) < 1e-14);
                for (std::size_t l = 0; l < P.size(); ++l)
                    if (l != k) CHECK(max_abs(P[k] * P[l]) < 1e-14);
            }
            CHECK(max_diff(sum, ComplexMatrix::identity(m.dim)) < 1e-14);
        }
        CHECK_THROWS(m.label_index(7));
    }
    CHECK_THROWS(build_model(Spin::half).label_index(0));
}

TEST_CASE("measurement operator is the Pauli matrix for spin-1/2 and S for spin-1") {
    const SpinModel h = build_model(Spin::half);
    CHECK(max_diff(measurement_operator(h, Observable::Sz), h.S[2] * Complex(2.0)) < 1e-15);
    CHECK(max_diff(measurement_operator(h, Observable::Sx), h.S[0] * Complex(2.0)) < 1e-15);
    const SpinModel o = build_model(Spin::one);
    CHECK(max_diff(measurement_operator(o, Observable::Sz), o.S[2]) == 0.0);
    CHECK(max_diff(measurement_operator(o, Observable::Sx), o.S[0]) == 0.0);
}

TEST_CASE("Gell-Mann matrices are Hermitian, traceless and orthogonal") {
    const auto& L = gell_mann_basis();
    for (int i = 0; i < 8; ++i) {
        CHECK(hermiticity_defect(L[i]) == 0.0);
        CHECK(std::abs(trace(L[i])) < 1e-15);
        for (int j = 0; j < 8; ++j) {
            const Complex t = trace_of_product(L[i], L[j]);
            CHECK(std::abs(t - Complex(i == j ? 2.0 : 0.0)) < 1e-14);
        }
    }
}

TEST_CASE("coherence vector round trip on random states") {
    std::mt19937_64 rng(21);
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        for (int trial = 0; trial < 1000; ++trial) {
            const DensityMatrix rho = random_state(m.dim, rng);
            const CoherenceVector c = coherence_from_rho(m, rho);
            CHECK(c.size() == (spin == Spin::half ? 3u : 8u));
            const DensityMatrix back = rho_from_coherence(m, c);
            CHECK(max_diff(back.mat(), rho.mat()) < 1e-13);

            const auto e = spin_expectations(m, rho);
            for (int k = 0; k < 3; ++k) CHECK(std::abs(e[k] - trace_of_product(rho.mat(), m.S[k]).real()) < 1e-14);
            if (spin == Spin::one) {
                const auto f = spin_components_from_coherence(c);
                for (int k = 0; k < 3; ++k) CHECK(std::abs(e[k] - f[k]) < 1e-13);
            }
        }
    }
}

TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(2)), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix(2, {0.5, 0.5, 0.0, 0.5})), std::invalid_argument);
    const double neg[] = {1.2, -0.2};
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::diagonal(neg)), std::invalid_argument);
    CHECK_NOTHROW(DensityMatrix(ComplexMatrix::identity(3) * Complex(1.0 / 3.0)));

    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        for (int dim : {2, 3}) {
            const StateDefects d = state_defects(random_pure_state(dim, rng).mat());
            CHECK(d.trace_error < 1e-14);
            CHECK(d.hermiticity == 0.0);
            CHECK(d.min_eigenvalue > -1e-12);
        }
    }
}

TEST_CASE("preset parsing and construction") {
    CHECK(parse_preset("mixed_start").kind == Preset::Kind::mixed_start);
    const Preset p = parse_preset("superpos_z(-1,0)");
    CHECK(p.kind == Preset::Kind::superpos_z);
    CHECK(p.label == -1);
    CHECK(p.second_label == 0);
    CHECK(parse_preset("eig_x(+1)").label == 1);
    CHECK_THROWS(parse_preset("eig_y(+1)"));
    CHECK_THROWS(parse_preset("eig_z(2)"));
    CHECK_THROWS(parse_preset("eig_z(+1"));

    const SpinModel one = build_model(Spin::one);
    const SpinModel half = build_model(Spin::half);
    CHECK_THROWS(preset_state(half, "eig_z(0)"));

    SUBCASE("eigenstate presets") {
        for (const SpinModel* m : {&one, &half}) {
            for (int label : m->labels) {
                const std::string sign = label > 0 ? "+1" : (label < 0 ? "-1" : "0");
                const auto z = spin_expectations(*m, preset_state(*m, "eig_z(" + sign + ")"));
                const auto x = spin_expectations(*m, preset_state(*m, "eig_x(" + sign + ")"));
                const double lambda = m->spin == Spin::half ? 0.5 * label : label;
                CHECK(z[2] == doctest::Approx(lambda));
                CHECK(x[0] == doctest::Approx(lambda));
            }
        }
    }
    SUBCASE("equal-weight superposition of -1 and 0") {
        const auto e = spin_expectations(one, preset_state(one, "superpos_z(-1,0)"));
        CHECK(e[2] == doctest::Approx(-0.5));
        CHECK(std::abs(e[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("maximally mixed start") {
        const DensityMatrix rho = preset_state(one, "mixed_start");
        CHECK(max_diff(rho.mat(), ComplexMatrix::identity(3) * Complex(1.0 / 3.0)) < 1e-15);
    }
}
