#include <doctest.h>

#include <cmath>

#include "amodelay/errors.hpp"
#include "amodelay/params.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace amodelay;

namespace {

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("published coefficient table is reproduced") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    CHECK(std::abs(c.a1 - 0.1479) <= 5e-5);
    CHECK(std::abs(c.a2 - 0.0540) <= 5e-5);
    CHECK(std::abs(c.b1 - 0.4187) <= 5e-5);
    CHECK(std::abs(c.b2 - 0.2423) <= 5e-5);
}

TEST_CASE("third-layer coefficients match the calculator script") {
    // Values from an independent evaluation of the coefficient formulas.
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    CHECK(c.a1 == doctest::Approx(0.1479468078).epsilon(1e-9));
    CHECK(c.a2 == doctest::Approx(0.0540010335).epsilon(1e-9));
    CHECK(c.b1 == doctest::Approx(0.4186833375).epsilon(1e-9));
    CHECK(c.b2 == doctest::Approx(0.2422732884).epsilon(1e-9));
    CHECK(c.c1 == doctest::Approx(1.0554309132).epsilon(1e-9));
    CHECK(c.c2 == doctest::Approx(1.4691174018).epsilon(1e-9));
    CHECK(c.kappa_s == doctest::Approx(0.003942).epsilon(1e-9));
    CHECK(c.a1 > 0);
    CHECK(c.a2 > 0);
    CHECK(c.b1 > 0);
    CHECK(c.b2 > 0);
    CHECK(c.discriminant() > 0);
}

TEST_CASE("zero background flow gives zero betas") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    CHECK(c.beta1 == 0.0);
    CHECK(c.beta2 == 0.0);
    CHECK(c.beta3 == 0.0);
}

TEST_CASE("beta1 equals beta3 for equal upper layers") {
    PhysicalParams p;
    p.v_bar = 0.5e-2;
    p.w_bar = -0.17e-6;
    const ModelCoeffs c = derive_coeffs(p);
    CHECK(c.beta1 == doctest::Approx(c.beta3).epsilon(1e-14));
    CHECK(c.beta2 != 0.0);
    p.h1 = 500;
    p.h3 = 3400;
    const ModelCoeffs d = derive_coeffs(p);
    CHECK(d.beta1 != doctest::Approx(d.beta3));
}

TEST_CASE("physical parameter validation") {
    CHECK_NOTHROW(PhysicalParams{}.validate());
    for (double PhysicalParams::*field : {&PhysicalParams::W, &PhysicalParams::L, &PhysicalParams::Y,
                                          &PhysicalParams::H, &PhysicalParams::f}) {
        PhysicalParams p;
        p.*field = 0.0;
        CHECK_THROWS_AS(derive_coeffs(p), ConfigError);
        p.*field = -1.0;
        CHECK_THROWS_AS(derive_coeffs(p), ConfigError);
    }
    PhysicalParams p;
    p.h3 = 3000;  // layers no longer add up to H
    CHECK_THROWS_AS(p.validate(), ConfigError);
    PhysicalParams q;
    q.h1 = -600;
    CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("wave structure matches the published speeds and delays") {
    const WaveStructure ws = derive_wave_structure(derive_coeffs(PhysicalParams{}));
    CHECK(std::abs(ws.l_plus - 0.3527) <= 1e-4);
    CHECK(std::abs(ws.l_minus - 0.0375) <= 1e-4);
    CHECK(std::abs(ws.tau_plus - 2.835) <= 0.01);
    CHECK(std::abs(ws.tau_minus - 26.67) <= 0.05);
    CHECK(ws.tau_minus > 26.6);
    CHECK(ws.tau_minus < 26.7);
    CHECK(ws.l_plus > ws.l_minus);
    CHECK(ws.l_minus > 0);
    CHECK(ws.tau_plus * ws.l_plus == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("decoupled and triangular systems") {
    ModelCoeffs c;
    c.a1 = 0.3;
    c.b2 = 0.1;
    c.b1 = 0.2;
    c.a2 = 0.0;
    WaveStructure ws = derive_wave_structure(c);
    CHECK(ws.l_plus == doctest::Approx(0.3));
    CHECK(ws.l_minus == doctest::Approx(0.1));
    CHECK(max_abs(ws.C1 + ws.C2 + Mat2::Identity()) < 1e-14);
    CHECK(max_abs(c.A() * ws.P_plus() - ws.l_plus * ws.P_plus()) < 1e-14);

    c.b1 = 0.0;
    c.a2 = 0.4;
    ws = derive_wave_structure(c);
    CHECK(ws.l_plus == doctest::Approx(0.3));
    CHECK(ws.l_minus == doctest::Approx(0.1));
    CHECK(max_abs(ws.C1 * ws.C2) < 1e-14);
}

TEST_CASE("degenerate characteristics are rejected") {
    ModelCoeffs c;
    c.a1 = 1.0;
    c.b2 = 1.0;
    c.a2 = -1.0;
    c.b1 = 1.0;
    CHECK(c.discriminant() < 0);
    CHECK_THROWS_AS(derive_wave_structure(c), DegenerateCharacteristics);
    CHECK_THROWS_AS(expansion_coeffs(c), DegenerateCharacteristics);
    CHECK_THROWS_AS(characteristic_speeds(1, 0, 0, 1), DegenerateCharacteristics);
    // DegenerateCharacteristics is a configuration error.
    CHECK_THROWS_AS(derive_wave_structure(c), ConfigError);
}

TEST_CASE("coupling matrices agree with the projector construction") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    const WaveStructure ws = derive_wave_structure(c);
    Mat2 e1 = Mat2::Zero(), e2 = Mat2::Zero();
    e1(0, 0) = 1;
    e2(1, 1) = 1;
    // First T_P column is the slow eigenvector, so diag(0,1) selects the fast one.
    const Mat2 C1 = -ws.T_P * e2 * ws.T_P_inv;
    const Mat2 C2 = -ws.T_P * e1 * ws.T_P_inv;
    CHECK(max_abs(C1 - ws.C1) < 1e-12);
    CHECK(max_abs(C2 - ws.C2) < 1e-12);

    const CouplingPair closed = moc_coupling_closed_form(c);
    CHECK(max_abs(closed.first - ws.C1) < 1e-12);
    CHECK(max_abs(closed.second - ws.C2) < 1e-12);

    const testsupport::Projectors pr = testsupport::lagrange_projectors(c.A());
    CHECK(max_abs(-pr.P_big - ws.C1) < 1e-12);
    CHECK(max_abs(-pr.P_small - ws.C2) < 1e-12);
}

TEST_CASE("published T_P column order") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    const WaveStructure ws = derive_wave_structure(c);
    Mat2 D = Mat2::Zero();
    D(0, 0) = ws.l_minus;
    D(1, 1) = ws.l_plus;
    CHECK(max_abs(c.A() * ws.T_P - ws.T_P * D) < 1e-12);
    CHECK(max_abs(ws.T_P * ws.T_P_inv - Mat2::Identity()) < 1e-14);
    CHECK(ws.T_P(1, 0) == 1.0);
    CHECK(ws.T_P(1, 1) == 1.0);
    CHECK(ws.T_P(0, 0) == doctest::Approx(ws.w_minus));
    CHECK(ws.T_P(0, 1) == doctest::Approx(ws.w_plus));
}

TEST_CASE("projector algebra on random admissible coefficients") {
    testsupport::Gen gen(20240611);
    for (int trial = 0; trial < 100; ++trial) {
        const ModelCoeffs c = gen.admissible_coeffs();
        const WaveStructure ws = derive_wave_structure(c);
        CAPTURE(trial);
        CHECK(max_abs(ws.C1 + ws.C2 + Mat2::Identity()) <= 1e-12);
        CHECK(max_abs(ws.C1 * ws.C2) <= 1e-12);
        CHECK(max_abs(ws.C2 * ws.C1) <= 1e-12);
        CHECK(max_abs(ws.C1 * ws.C1 + ws.C1) <= 1e-12);
        CHECK(max_abs(ws.C2 * ws.C2 + ws.C2) <= 1e-12);
        CHECK(max_abs(ws.tau_plus * ws.M_plus - c.A() * ws.C1) <= 1e-12);
        CHECK(max_abs(ws.tau_minus * ws.M_minus - c.A() * ws.C2) <= 1e-12);
    }
}

TEST_CASE("MZ constants equal the speed-weighted projectors") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    const WaveStructure ws = derive_wave_structure(c);
    const CouplingPair mz = mz_coupling_constants(c);
    CHECK(max_abs(mz.first + ws.l_plus * ws.l_plus * ws.P_plus()) < 1e-12);
    CHECK(max_abs(mz.second + ws.l_minus * ws.l_minus * ws.P_minus()) < 1e-12);
}

TEST_CASE("expansion coefficients") {
    const ModelCoeffs c = derive_coeffs(PhysicalParams{});
    const WaveStructure ws = derive_wave_structure(c);
    const ExpansionCoeffs e0 = expansion_coeffs(c);
    CHECK(e0.l1_plus == 0.0);
    CHECK(e0.l1_minus == 0.0);
    CHECK(e0.l0_plus == doctest::Approx(ws.l_plus).epsilon(1e-13));
    CHECK(e0.l0_minus == doctest::Approx(ws.l_minus).epsilon(1e-12));

    const ModelCoeffs cb = with_betas(c, kFigureBeta13, kFigureBeta2, kFigureBeta13);
    const ExpansionCoeffs e = expansion_coeffs(cb);
    CHECK(e.l1_plus > 0);
    CHECK(e.l1_minus < 0);

    // Centered finite difference of the exact dx-dependent speeds.
    const double h = 1e-4;
    const Speeds up = extended_speeds(cb, h), dn = extended_speeds(cb, -h);
    CHECK(e.l1_plus == doctest::Approx((up.l_plus - dn.l_plus) / (2 * h)).epsilon(1e-6));
    CHECK(e.l1_minus == doctest::Approx((up.l_minus - dn.l_minus) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("basin-width sensitivity rows") {
    struct Row {
        double W_km, two_tau_minus, two_thirds_tau_minus, two_tau_plus;
    };
    const Row rows[] = {{6540, 87.15, 29.05, 9.27}, {6240, 83.15, 27.72, 8.85}, {5760, 76.75, 25.58, 8.17},
                        {5100, 67.96, 22.65, 7.23}, {4260, 56.77, 18.92, 6.04}, {3360, 44.77, 14.92, 4.76},
                        {2280, 30.38, 10.13, 3.23}};
    for (const Row& r : rows) {
        const WaveStructure ws =
            derive_wave_structure(derive_coeffs(scale_basin_width(PhysicalParams{}, r.W_km * 1e3)));
        CAPTURE(r.W_km);
        CHECK(std::abs(2 * ws.tau_minus - r.two_tau_minus) <= 0.05);
        CHECK(std::abs(2.0 / 3.0 * ws.tau_minus - r.two_thirds_tau_minus) <= 0.05);
        CHECK(std::abs(2 * ws.tau_plus - r.two_tau_plus) <= 0.05);
    }
}

TEST_CASE("basin-width scaling law") {
    const PhysicalParams p;
    CHECK(scale_basin_width(p, p.W) == p);
    CHECK_THROWS_AS(scale_basin_width(p, 0.0), ConfigError);
    CHECK_THROWS_AS(scale_basin_width(p, -5.0), ConfigError);

    const ModelCoeffs c = derive_coeffs(p);
    const WaveStructure ws = derive_wave_structure(c);
    for (double k : {0.5, 1.3, 2.0}) {
        const ModelCoeffs ck = derive_coeffs(scale_basin_width(p, k * p.W));
        const WaveStructure wk = derive_wave_structure(ck);
        CHECK(wk.tau_plus == doctest::Approx(k * ws.tau_plus).epsilon(1e-12));
        CHECK(wk.tau_minus == doctest::Approx(k * ws.tau_minus).epsilon(1e-12));
        CHECK(ck.a1 * k == doctest::Approx(c.a1).epsilon(1e-13));
        CHECK(ck.b1 * k == doctest::Approx(c.b1).epsilon(1e-13));
        CHECK(ck.c2 * k == doctest::Approx(c.c2).epsilon(1e-13));
        CHECK(ck.kappa_s * k * k == doctest::Approx(c.kappa_s).epsilon(1e-13));
    }
}
