// test_coherence_sde.cpp — master-equation terms and the reference coherence SDEs

#include "qsd/coherence_sde.hpp"
#include "qsd/sde.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qsd;

TEST_CASE("dissipator and diffusion preserve trace and Hermiticity") {
    std::mt19937_64 rng(31);
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        const ComplexMatrix L = measurement_operator(m, Observable::Sz) * Complex(0.7);
        for (int trial = 0; trial < 200; ++trial) {
            const ComplexMatrix rho = random_state(m.dim, rng).mat();
            const ComplexMatrix d = dissipator(rho, L);
            const ComplexMatrix n = diffusion_term(rho, L);
            CHECK(std::abs(trace(d)) < 1e-14);
            CHECK(std::abs(trace(n)) < 1e-14);
            CHECK(hermiticity_defect(d) < 1e-14);
            CHECK(hermiticity_defect(n) < 1e-14);
        }
    }
}

TEST_CASE("eigenprojectors of the measured observable are stationary") {
    for (Spin spin : {Spin::half, Spin::one}) {
        const SpinModel m = build_model(spin);
        const ComplexMatrix L = measurement_operator(m, Observable::Sx) * Complex(1.3);
        for (const auto& P : m.projectors_x) {
            CHECK(max_abs(dissipator(P, L)) < 1e-14);
            CHECK(max_abs(diffusion_term(P, L)) < 1e-14);
        }
    }
}

TEST_CASE("spin-1/2 Bloch-vector equations under L = a sigma_z") {
    // dr_x = -2a² r_x dt - 2a r_x r_z dW,  dr_z = 2a (1 - r_z²) dW
    const SpinModel m = build_model(Spin::half);
    const double a = 0.8;
    const ComplexMatrix L = measurement_operator(m, Observable::Sz) * Complex(a);
    const ComplexMatrix L_arr[] = {L};
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityMatrix rho = random_state(2, rng);
        const auto r = coherence_from_rho(m, rho);
        const ComplexMatrix drift = lindblad_generator(rho.mat(), ComplexMatrix(2), L_arr);
        const ComplexMatrix noise = diffusion_term(rho.mat(), L);
        const auto dr = coherence_from_rho(m, DensityMatrix::unchecked(drift + ComplexMatrix::identity(2) * Complex(0.5)));
        const auto nr = coherence_from_rho(m, DensityMatrix::unchecked(noise + ComplexMatrix::identity(2) * Complex(0.5)));
        CHECK(dr[0] == doctest::Approx(-2 * a * a * r[0]).epsilon(1e-12));
        CHECK(std::abs(dr[2]) < 1e-13);
        CHECK(nr[0] == doctest::Approx(-2 * a * r[0] * r[2]).epsilon(1e-12));
        CHECK(nr[2] == doctest::Approx(2 * a * (1 - r[2] * r[2])).epsilon(1e-12));
    }
}

TEST_CASE("reference spin-1 coherence SDEs against the derived coefficients") {
    const CoherenceSdeReport report = validate_coherence_sde(200, 33);
    REQUIRE(report.terms.size() == 24u);

    SUBCASE("drift terms all agree") {
        for (const char* c : kCoherenceNames) CHECK_MESSAGE(report.find(c, "drift").matches, c);
    }
    SUBCASE("non-suspect noise terms agree apart from the dv sign") {
        for (const auto& t : report.terms) {
            if (t.term == "drift" || t.known_suspect) continue;
            if (t.component == "v" && t.term == "dWx") continue;
            CHECK_MESSAGE(t.matches, t.component << " " << t.term << " deviation " << t.max_deviation);
        }
    }
    SUBCASE("the printed dv dW_x term carries a sign error") {
        CHECK_FALSE(report.find("v", "dWx").matches);
    }
    SUBCASE("flagged suspects are the dm and du dW_z terms") {
        CHECK(is_known_suspect("m", "dWz"));
        CHECK(is_known_suspect("u", "dWz"));
        CHECK_FALSE(is_known_suspect("v", "dWx"));
        CHECK_FALSE(report.find("m", "dWz").matches);
        CHECK_FALSE(report.find("u", "dWz").matches);
    }
}

TEST_CASE("derived coefficients rebuild the master-equation increments") {
    const SpinModel m = build_model(Spin::one);
    std::mt19937_64 rng(34);
    const double a = 0.9, b = 1.4;
    const ComplexMatrix lz[] = {m.S[2] * Complex(a)};
    const ComplexMatrix both[] = {m.S[2] * Complex(a), m.S[0] * Complex(b)};
    const ComplexMatrix third = ComplexMatrix::identity(3) * Complex(1.0 / 3.0);
    auto as_matrix = [&](const std::array<double, 8>& d) {
        return rho_from_coherence(m, CoherenceVector{{d.begin(), d.end()}}).mat() - third;
    };
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix rho = random_state(3, rng);
        const auto coeff = derived_sde_coefficients(m, rho, a, b);
        CHECK(max_abs(as_matrix(coeff.drift) - lindblad_generator(rho.mat(), ComplexMatrix(3), both)) < 1e-12);
        CHECK(max_abs(as_matrix(coeff.diff_z) - diffusion_term(rho.mat(), lz[0])) < 1e-12);
        CHECK(max_abs(as_matrix(coeff.diff_x) - diffusion_term(rho.mat(), both[1])) < 1e-12);
    }
}
