#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "amodelay/delay_models.hpp"
#include "amodelay/errors.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/spectral.hpp"

using namespace amodelay;

namespace {

const ModelCoeffs kCoeffs = derive_coeffs(PhysicalParams{});
const WaveStructure kWs = derive_wave_structure(kCoeffs);

using Profile = std::function<Vec2(double)>;

HistoryBuffer fill(const Profile& f, double t_begin, double t_end, double spacing) {
    const auto n = static_cast<std::size_t>(std::ceil((t_end - t_begin) / spacing - 1e-9));
    HistoryBuffer h(t_end - static_cast<double>(n) * spacing, spacing);
    h.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) h.push_back(f(h.time(k)));
    return h;
}

// Sum of one mode per branch; an exact solution of the difference system at
// alpha = 0 since the modal components flip sign every tau±.
Vec2 two_mode(double s) {
    const double wp = std::numbers::pi / kWs.tau_plus;
    const double wm = 3.0 * std::numbers::pi / kWs.tau_minus;
    return kWs.v_plus * std::cos(wp * s) + 0.5 * kWs.v_minus * std::cos(wm * s + 0.3);
}

double max_diff(const Trajectory& a, const HistoryBuffer& ref, double t_max) {
    double m = 0;
    for (std::size_t i = 0; i < a.size() && a.t[i] <= t_max + 1e-12; ++i)
        m = std::max(m, (a.value(i) - ref.at(a.t[i])).cwiseAbs().maxCoeff());
    return m;
}

double max_diff(const Trajectory& a, const Profile& ref, double t_max) {
    double m = 0;
    for (std::size_t i = 0; i < a.size() && a.t[i] <= t_max + 1e-12; ++i)
        m = std::max(m, (a.value(i) - ref(a.t[i])).cwiseAbs().maxCoeff());
    return m;
}

Grid warmup_grid() {
    Grid g;
    g.N = 400;
    g.dt = 0.0025;
    return g;
}

FieldState pulse_ic(const Grid& g) { return init_gaussian(g, GaussianPulse{}); }

Trajectory every(const Trajectory& tr, std::size_t stride) {
    Trajectory out;
    for (std::size_t i = 0; i < tr.size(); i += stride) out.push(tr.t[i], tr.value(i));
    return out;
}

}  // namespace

TEST_CASE("variant names") {
    CHECK(delay_variant_from_string("moc") == DelayVariant::dde_moc);
    CHECK(delay_variant_from_string("dde_mz") == DelayVariant::dde_mz);
    CHECK(to_string(DelayVariant::difference) == "difference");
    CHECK_THROWS_AS(delay_variant_from_string("euler"), ConfigError);
}

TEST_CASE("delay system construction") {
    CHECK_THROWS_AS(make_delay_system(kCoeffs, DelayVariant::dde_moc, 0.0), ConfigError);
    CHECK_THROWS_AS(make_delay_system(kCoeffs, DelayVariant::dde_mz, -1.0), ConfigError);
    const DelaySystem d = make_delay_system(kCoeffs, DelayVariant::difference, 0.5);
    CHECK(d.eps == 0.0);

    ModelCoeffs bad;
    bad.a1 = 0.1;
    bad.b1 = 0.5;
    bad.a2 = 0.5;
    bad.b2 = 0.1;  // det A < 0: one speed is negative
    CHECK_THROWS_AS(make_delay_system(bad, DelayVariant::dde_moc, 0.01), DegenerateCharacteristics);
}

TEST_CASE("zero history gives zero output") {
    for (DelayVariant v : {DelayVariant::difference, DelayVariant::dde_moc, DelayVariant::dde_mz}) {
        const DelaySystem sys = make_delay_system(kCoeffs, v, 0.05);
        HistoryBuffer h = fill([](double) { return Vec2::Zero(); }, -30.0, 0.0, 0.005);
        CHECK(step_difference(h, sys, 0.1).norm() == 0.0);
        IntegrateOptions o;
        o.t_end = 10.0;
        const Trajectory tr = integrate_dde(h, sys, o);
        for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.value(i).norm() == 0.0);
    }
}

TEST_CASE("single-mode history is a fixed point of the difference system") {
    const DelaySystem sys = make_delay_system(kCoeffs, DelayVariant::difference, 0.0);
    for (int k : {0, 1, 2}) {
        const double w = std::numbers::pi * (2 * k + 1) / kWs.tau_plus;
        const Profile mode = [&](double s) { return Vec2(0.7 * kWs.v_plus * std::cos(w * s)); };
        HistoryBuffer h = fill(mode, -kWs.tau_minus - 1.0, 0.0, kWs.tau_plus / 4000.0);
        CHECK((step_difference(h, sys, 0.0) - mode(0.0)).norm() <= 1e-6);
        IntegrateOptions o;
        o.t_end = 3.0 * kWs.tau_minus;
        const Trajectory tr = integrate_dde(h, sys, o);
        CAPTURE(k);
        CHECK(max_diff(tr, mode, o.t_end) <= 1e-6);
    }
    HistoryBuffer h2 = fill(two_mode, -kWs.tau_minus - 1.0, 0.0, 0.001);
    IntegrateOptions o;
    o.t_end = 50.0;
    // the slow mode is looked up between samples
    CHECK(max_diff(integrate_dde(h2, sys, o), two_mode, 50.0) <= 1e-5);
}

TEST_CASE("strong damping drives the output to zero") {
    ModelCoeffs c = kCoeffs;
    c.alpha = 50.0;
    for (DelayVariant v : {DelayVariant::difference, DelayVariant::dde_moc}) {
        const DelaySystem sys = make_delay_system(c, v, 0.05);
        HistoryBuffer h = fill(two_mode, -30.0, 0.0, 0.005);
        CHECK(step_difference(h, sys, 0.0).norm() <= 1e-40);
        IntegrateOptions o;
        o.t_end = 5.0;
        const Trajectory tr = integrate_dde(h, sys, o);
        CHECK(tr.value(tr.size() - 1).norm() <= 1e-12);
    }
}

TEST_CASE("integration preconditions") {
    const DelaySystem moc = make_delay_system(kCoeffs, DelayVariant::dde_moc, 0.01);
    HistoryBuffer h = fill(two_mode, -30.0, 0.0, 0.001);
    IntegrateOptions o;
    o.t_end = 1.0;
    o.step = 0.003;  // > eps/5
    CHECK_THROWS_AS(integrate_dde(h, moc, o), ConfigError);
    o.step = 0.0003;  // does not divide the spacing
    CHECK_THROWS_AS(integrate_dde(h, moc, o), ConfigError);
    o.step = 0.0;
    o.t_end = -1.0;
    CHECK_THROWS_AS(integrate_dde(h, moc, o), ConfigError);

    // spacing above min(tau+, eps)/10
    HistoryBuffer coarse = fill(two_mode, -30.0, 0.0, 0.002);
    o.t_end = 1.0;
    CHECK_THROWS_AS(integrate_dde(coarse, moc, o), ConfigError);

    // too short for the long delay
    HistoryBuffer shortbuf = fill(two_mode, -20.0, 0.0, 0.001);
    CHECK_THROWS_AS(integrate_dde(shortbuf, moc, o), NumericalError);
    CHECK_THROWS_AS(step_difference(shortbuf, moc, 0.0), NumericalError);

    HistoryBuffer none(0.0, 0.001);
    CHECK_THROWS_AS(integrate_dde(none, moc, o), ConfigError);

    // The Euler step may be finer than the default as long as it divides.
    o.step = 0.0005;
    CHECK_NOTHROW(integrate_dde(h, moc, o));
}

TEST_CASE("integration appends to the buffer") {
    const DelaySystem moc = make_delay_system(kCoeffs, DelayVariant::dde_moc, 0.01);
    HistoryBuffer h = fill(two_mode, -30.0, 0.0, 0.001);
    const std::size_t n0 = h.size();
    IntegrateOptions o;
    o.t_end = 2.0;
    const Trajectory tr = integrate_dde(h, moc, o);
    CHECK(h.size() == n0 + 2000);
    CHECK(tr.size() == 2001);
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.t.back() == doctest::Approx(2.0));
    CHECK(h.t_end() == doctest::Approx(2.0));
    CHECK((h.back() - tr.value(tr.size() - 1)).norm() == 0.0);
}

TEST_CASE("warmup history") {
    const Grid g = warmup_grid();
    const HistoryBuffer z = warmup_history(kCoeffs, g, zero_state(g));
    for (std::size_t k = 0; k < z.size(); ++k) CHECK(z[k].norm() == 0.0);

    const FieldState ic = pulse_ic(g);
    const HistoryBuffer h = warmup_history(kCoeffs, g, ic);
    CHECK(h.t_end() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(-h.t_begin() >= kWs.tau_minus);
    CHECK(-h.t_begin() >= 26.65);
    CHECK(h.spacing() == g.dt);

    // The final sample is the probe value at the end of the PDE run.
    const double run = std::ceil((kWs.tau_minus + 2.0 * g.dt) / g.dt + 1.0) * g.dt;
    SimulationOptions so;
    so.t_end = run;
    FieldState fin;
    simulate(ic, kCoeffs, g, ModelVariant::two_layer, so, &fin);
    CHECK(h.back()(0) == doctest::Approx(fin.T1[0]).epsilon(1e-12));
    CHECK(h.back()(1) == doctest::Approx(fin.T2[0]).epsilon(1e-12));

    WarmupOptions wo;
    wo.duration = 10.0;
    CHECK_THROWS_AS(warmup_history(kCoeffs, g, ic, wo), ConfigError);
    wo.duration = 0.0;
    wo.spacing = g.dt / 10.0;
    const HistoryBuffer fine = warmup_history(kCoeffs, g, ic, wo);
    CHECK(fine.spacing() == doctest::Approx(g.dt / 10.0));
    // The two runs may end one PDE step apart.
    CHECK(std::abs(fine.at(-5.0)(0) - h.at(-5.0)(0)) <= 5e-3);
}

TEST_CASE("regularized model converges to the difference system as eps shrinks") {
    const DelaySystem diff = make_delay_system(kCoeffs, DelayVariant::difference, 0.0);
    HistoryBuffer ref = fill(two_mode, -kWs.tau_minus - 0.5, 0.0, 0.001);
    IntegrateOptions od;
    od.t_end = 50.0;
    integrate_dde(ref, diff, od);

    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const DelaySystem moc = make_delay_system(kCoeffs, DelayVariant::dde_moc, eps);
        HistoryBuffer h = fill(two_mode, -kWs.tau_minus - 0.1, 0.0, eps / 10.0);
        IntegrateOptions o;
        o.t_end = 50.0;
        const double d = max_diff(integrate_dde(h, moc, o), ref, 50.0);
        CAPTURE(eps);
        CHECK(d < prev);
        CHECK(d <= 50.0 * eps);
        prev = d;
    }
}

TEST_CASE("the MZ delay model differs from the MoC model at first order in eps") {
    std::vector<double> d;
    const std::vector<double> epss = {1e-2, 5e-3, 2.5e-3};
    for (double eps : epss) {
        const DelaySystem moc = make_delay_system(kCoeffs, DelayVariant::dde_moc, eps);
        const DelaySystem mz = make_delay_system(kCoeffs, DelayVariant::dde_mz, eps);
        HistoryBuffer h1 = fill(two_mode, -kWs.tau_minus - 0.1, 0.0, eps / 10.0);
        HistoryBuffer h2 = h1;
        IntegrateOptions o;
        o.t_end = 50.0;
        integrate_dde(h1, moc, o);
        const Trajectory b = integrate_dde(h2, mz, o);
        d.push_back(max_diff(b, h1, 50.0));
    }
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        const double rate = std::log(d[i] / d[i + 1]) / std::log(epss[i] / epss[i + 1]);
        CAPTURE(d[i]);
        CAPTURE(d[i + 1]);
        CHECK(rate >= 0.8);
        CHECK(rate <= 1.2);
    }
}

TEST_CASE("solutions seeded at different locations are related by the characteristic shift") {
    ModelCoeffs c = kCoeffs;
    c.alpha = 0.01;
    const WaveStructure ws = derive_wave_structure(c);
    const double eps = 0.01, sp = 0.001, x = 0.25;
    const DelaySystem sys = make_delay_system(c, DelayVariant::dde_moc, eps);
    IntegrateOptions o;
    o.step = 1e-4;

    // A long run at x = 0; its later part serves as a self-consistent history.
    HistoryBuffer base = fill(two_mode, -ws.tau_minus - 0.1, 0.0, sp);
    o.t_end = 100.0;
    integrate_dde(base, sys, o);

    const double t0 = 40.0;
    const Profile at_x = [&](double s) {
        return Vec2(std::exp(-c.alpha * ws.tau_plus * x) * ws.P_plus() * base.at(t0 + s - ws.tau_plus * x) +
                    std::exp(-c.alpha * ws.tau_minus * x) * ws.P_minus() * base.at(t0 + s - ws.tau_minus * x));
    };
    HistoryBuffer hx = fill(at_x, -ws.tau_minus - 0.1, 0.0, sp);
    o.t_end = 50.0;
    const Trajectory tx = integrate_dde(hx, sys, o);
    double err = 0;
    for (std::size_t i = 0; i < tx.size(); ++i)
        err = std::max(err, (tx.value(i) - at_x(tx.t[i])).cwiseAbs().maxCoeff());
    CHECK(err <= 1e-4);
}

TEST_CASE("error functional on a constant history") {
    const DelaySystem sys = make_delay_system(kCoeffs, DelayVariant::dde_mz, 0.01);
    const Vec2 T(0.4, -1.1);
    const HistoryBuffer h = fill([&](double) { return T; }, -30.0, 0.0, 0.01);
    const DelayCoefficients& d = sys.mz;
    const Vec2 expect = d.markov_eps * T + d.g_plus[0] * d.G_plus * T + d.g_minus[0] * d.G_minus * T;
    CHECK((error_functional(h, sys, 0.0) - expect).norm() <= 1e-12);
    CHECK((error_terms(h, sys, 0.0, 100) - expect / 100.0).norm() <= 1e-14);
    CHECK_THROWS_AS(error_terms(h, sys, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(error_functional(h, sys, -5.0), NumericalError);
}

TEST_CASE("delayed model follows the PDE spectrum") {
    const Grid g = warmup_grid();
    const FieldState ic = pulse_ic(g);
    const double eps = 1.0 / g.N;
    WarmupOptions wo;
    wo.spacing = eps / 10.0;
    HistoryBuffer h = warmup_history(kCoeffs, g, ic, wo);
    const DelaySystem sys = make_delay_system(kCoeffs, DelayVariant::dde_moc, eps);
    IntegrateOptions o;
    o.t_end = 100.0;
    const Trajectory dde = every(integrate_dde(h, sys, o), 10);

    // Same time window from the PDE.
    const double run = std::ceil((kWs.tau_minus + 2.0 * wo.spacing) / g.dt + 1.0) * g.dt;
    SimulationOptions so;
    so.t_end = run + 100.0;
    const Trajectory full = simulate(ic, kCoeffs, g, ModelVariant::two_layer, so);
    Trajectory pde;
    for (std::size_t i = 0; i < full.size(); ++i)
        if (full.t[i] >= run - 1e-9) pde.push(full.t[i] - run, full.value(i));

    const SpectrumResult a = psd(pde, 1);
    const SpectrumResult b = psd(dde, 1);
    REQUIRE(!a.peaks.empty());
    REQUIRE(!b.peaks.empty());
    CHECK(std::abs(a.peaks[0].frequency - b.peaks[0].frequency) <= std::max(a.df, b.df) + 1e-12);

    // Below the surface the long and short lines are close in power, and the
    // upwind scheme's diffusion damps the short one; compare the leading
    // lines as a set.
    const SpectrumResult a2 = psd(pde, 2);
    const SpectrumResult b2 = psd(dde, 2);
    REQUIRE(a2.peaks.size() >= 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const Peak* q = nearest_peak(b2, a2.peaks[k].frequency);
        REQUIRE(q != nullptr);
        CHECK(std::abs(q->frequency - a2.peaks[k].frequency) <= a2.df + 1e-12);
    }
}

TEST_CASE("delayed model spectrum shows the long and short cycles") {
    const Grid g = warmup_grid();
    const double eps = 1.0 / g.N;
    WarmupOptions wo;
    wo.spacing = eps / 10.0;
    HistoryBuffer h = warmup_history(kCoeffs, g, pulse_ic(g), wo);
    const DelaySystem sys = make_delay_system(kCoeffs, DelayVariant::dde_moc, eps);
    IntegrateOptions o;
    o.t_end = 200.0;
    const Trajectory tr = every(integrate_dde(h, sys, o), 10);

    const SpectrumResult s1 = psd(tr, 1);
    const SpectrumResult s2 = psd(tr, 2);
    REQUIRE(!s1.peaks.empty());
    const double f_long = 1.0 / (2.0 * kWs.tau_minus);
    const double f_third = 3.0 / (2.0 * kWs.tau_minus);
    const double f_short = 1.0 / (2.0 * kWs.tau_plus);
    CHECK(std::abs(s1.peaks[0].frequency - f_long) <= s1.df);
    const Peak* third = nearest_peak(s1, f_third);
    REQUIRE(third != nullptr);
    CHECK(std::abs(third->frequency - f_third) <= s1.df);
    CHECK(third->power < s1.peaks[0].power);

    // Short cycle is weaker at the surface than below, relative to the
    // dominant line.
    const Peak* p1 = nearest_peak(s1, f_short);
    const Peak* p2 = nearest_peak(s2, f_short);
    REQUIRE(p2 != nullptr);
    CHECK(std::abs(p2->frequency - f_short) <= 2.0 * s2.df);
    const double rel2 = p2->power / s2.peaks[0].power;
    const double rel1 = (p1 && std::abs(p1->frequency - f_short) <= 2.0 * s1.df) ? p1->power / s1.peaks[0].power : 0.0;
    CHECK(rel1 < rel2);
}
