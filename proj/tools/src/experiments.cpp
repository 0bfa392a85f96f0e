#include "amodelay_cli/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "amodelay/errors.hpp"

namespace amodelay::cli {

std::vector<SensitivityRow> sensitivity_table(const PhysicalParams& base, std::span<const double> widths_km) {
    std::vector<SensitivityRow> rows;
    for (double w : widths_km) {
        const WaveStructure ws = derive_wave_structure(derive_coeffs(scale_basin_width(base, w * 1e3)));
        rows.push_back({w, 2.0 * ws.tau_minus, 2.0 / 3.0 * ws.tau_minus, 2.0 * ws.tau_plus});
    }
    return rows;
}

DelayRun run_delay_model(const ModelCoeffs& c, const DelayRunSetup& setup) {
    if (setup.stride < 1) throw ConfigError("stride must be at least 1");
    Grid g;
    g.N = setup.N;
    g.dt = setup.dt;
    g.validate();
    DelayRun run;
    run.eps = setup.eps > 0.0 ? setup.eps : 1.0 / setup.N;
    run.sys = make_delay_system(c, setup.variant, run.eps, setup.correction);

    WarmupOptions wo;
    wo.spacing = setup.variant == DelayVariant::difference ? g.dt : run.eps / 10.0;
    const FieldState ic = setup.zero_ic ? zero_state(g) : init_gaussian(g, GaussianPulse{});
    run.buffer = warmup_history(c, g, ic, wo);

    IntegrateOptions io;
    io.t_end = setup.t_end;
    const Trajectory full = integrate_dde(run.buffer, run.sys, io);
    for (std::size_t i = 0; i < full.size(); i += static_cast<std::size_t>(setup.stride))
        run.traj.push(full.t[i], full.value(i));
    return run;
}

namespace {

constexpr double kSeriesSpacing = 0.01;

// f_eps samples over [tau-, t_end] on a run's buffer.
Trajectory f_eps_series(const HistoryBuffer& h, const DelaySystem& sys, double t_end) {
    Trajectory out;
    const double t0 = sys.ws.tau_minus;
    const auto n = static_cast<std::size_t>(std::floor((t_end - t0) / kSeriesSpacing + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = t0 + static_cast<double>(k) * kSeriesSpacing;
        if (t > h.t_end() - h.spacing()) break;
        out.push(t, error_functional(h, sys, t));
    }
    return out;
}

double max_abs(const Trajectory& tr) {
    double m = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) m = std::max({m, std::abs(tr.T1[i]), std::abs(tr.T2[i])});
    return m;
}

std::vector<double> ratios_of(const std::vector<double>& v) {
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) r.push_back(v[i] / v[i + 1]);
    return r;
}

}  // namespace

ErrorTermStudy error_term_study(const ModelCoeffs& c, std::span<const int> Ns, bool self_consistent,
                                double t_end) {
    if (Ns.empty()) throw ConfigError("error_term_study needs at least one N");
    ErrorTermStudy st;
    st.Ns.assign(Ns.begin(), Ns.end());

    DelayRunSetup ref;
    ref.variant = DelayVariant::dde_moc;
    ref.t_end = t_end;
    const DelayRun run = run_delay_model(c, ref);
    st.series = f_eps_series(run.buffer, run.sys, t_end);
    const double m = max_abs(st.series);
    for (int N : Ns) st.max_abs.push_back(m / N);
    st.ratios = ratios_of(st.max_abs);

    const SpectrumResult s = psd(st.series, 1);
    st.df = s.df;
    if (!s.peaks.empty()) st.peak_frequency = s.peaks.front().frequency;

    if (self_consistent) {
        for (int N : Ns) {
            DelayRunSetup own;
            own.N = N;
            own.variant = DelayVariant::dde_mz;
            own.t_end = t_end;
            Grid g;
            g.N = N;
            g.dt = 1.0;
            // Warm up at the history spacing so the buffer holds PDE samples
            // rather than a linear interpolant, whose kinks would dominate
            // the second differences in f_eps.
            own.dt = std::min(1.0 / (10.0 * N), 0.5 * max_stable_dt(c, g, ModelVariant::two_layer));
            const DelayRun r = run_delay_model(c, own);
            st.self_max_abs.push_back(max_abs(f_eps_series(r.buffer, r.sys, t_end)) / N);
        }
        st.self_ratios = ratios_of(st.self_max_abs);
    }
    return st;
}

double loglog_slope(std::span<const int> Ns, std::span<const double> err) {
    if (Ns.size() != err.size() || Ns.size() < 2) throw ConfigError("slope needs matching series of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const double x = std::log(static_cast<double>(Ns[i])), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    // error ~ N^{-slope}
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool strictly_decreasing(std::span<const double> v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i + 1] < v[i])) return false;
    return true;
}

BcErrorStudy bc_error_study(const ModelCoeffs& c, std::span<const int> Ns, Branch b, int k) {
    const WaveStructure ws = derive_wave_structure(c);
    BcErrorStudy st;
    st.Ns.assign(Ns.begin(), Ns.end());
    const double l = b == Branch::plus ? ws.l_plus : ws.l_minus;
    const Complex exact(-c.alpha, 3.14159265358979323846 * (2 * k + 1) * l);
    Complex g_moc = exact, g_mz = exact;
    for (int N : Ns) {
        const double eps = 1.0 / N;
        const Complex ld = discrete_eigenvalue(c, N, b, k);
        st.lambda_disc.push_back(ld);
        st.disc.push_back(eigenfunction_bc_error(ld, ws, c.alpha, DiscretePdeSource{N, b}).error);

        for (auto v : {DelayVariant::dde_moc, DelayVariant::dde_mz}) {
            const DelaySystem sys = make_delay_system(c, v, eps);
            Complex& guess = v == DelayVariant::dde_moc ? g_moc : g_mz;
            const CharRootsResult r = char_roots(sys, std::span<const Complex>(&guess, 1));
            if (r.roots.empty()) throw NumericalError("characteristic root did not converge");
            guess = r.roots.front().lambda;
            const double e = eigenfunction_bc_error(guess, ws, c.alpha, DelayModelSource{sys}).error;
            if (v == DelayVariant::dde_moc) {
                st.lambda_moc.push_back(guess);
                st.moc.push_back(e);
            } else {
                st.lambda_mz.push_back(guess);
                st.mz.push_back(e);
            }
        }
    }
    st.slope_disc = loglog_slope(Ns, st.disc);
    st.slope_moc = loglog_slope(Ns, st.moc);
    st.slope_mz = loglog_slope(Ns, st.mz);
    return st;
}

double band_power(const SpectrumResult& s, double f, int half_width) {
    const auto k = static_cast<long>(std::lround(f / s.df));
    double best = 0;
    for (long j = k - half_width; j <= k + half_width; ++j)
        if (j >= 0 && j < static_cast<long>(s.psd.size())) best = std::max(best, s.psd[static_cast<std::size_t>(j)]);
    return best;
}

DampingStudy extended_damping_study(const ModelCoeffs& c, double t_end) {
    const ModelCoeffs base = with_betas(c, 0.0, 0.0, 0.0);
    const ModelCoeffs ext = with_betas(c, kFigureBeta13, kFigureBeta2, kFigureBeta13);
    const WaveStructure ws = derive_wave_structure(base);
    const Grid g{400, 0.0025};
    SimulationOptions o;
    o.t_end = t_end;
    o.sample_every = 20;
    auto ratio = [&](const ModelCoeffs& cc, ModelVariant v) {
        const SpectrumResult sp = psd(simulate(init_gaussian(g, {}), cc, g, v, o), 1);
        return band_power(sp, 1.0 / (2 * ws.tau_plus)) / band_power(sp, 1.0 / (2 * ws.tau_minus));
    };
    DampingStudy st;
    st.base_ratio = ratio(base, ModelVariant::two_layer);
    st.extended_ratio = ratio(ext, ModelVariant::extended);
    st.expansion = expansion_coeffs(ext);
    return st;
}

PhaseStudy overturning_phase_study(const PhysicalParams& p, const ModelCoeffs& c, double t_end) {
    const Grid g{400, 0.0025};
    std::vector<double> T, dv, du;
    SimulationOptions o;
    o.t_end = t_end;
    o.sample_every = 20;
    o.observer = [&](const FieldState& s) {
        const OverturningSample os = overturning_at(s, p, 0);
        T.push_back(s.T1[0]);
        dv.push_back(os.dv_dz);
        du.push_back(os.dzu);
    };
    simulate(init_gaussian(g, {}), c, g, ModelVariant::two_layer, o);
    const double dt = o.sample_every * g.dt;
    const SpectrumResult sp = psd(T, dt);
    if (sp.peaks.empty()) throw NumericalError("no spectral peak in the surface temperature");
    PhaseStudy st;
    const double f = sp.peaks.front().frequency;
    st.period = 1.0 / f;
    st.lag_dv_dz = phase_lag(T, dv, dt, f);
    st.lag_dzu = phase_lag(T, du, dt, f);
    return st;
}

}  // namespace amodelay::cli
