#include "amodelay_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amodelay/config.hpp"
#include "amodelay/csv.hpp"
#include "amodelay/delay_models.hpp"
#include "amodelay/dense_eigen.hpp"
#include "amodelay/errors.hpp"
#include "amodelay/ingest.hpp"
#include "amodelay/mz_reduce.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/spectral.hpp"
#include "amodelay_cli/experiments.hpp"
#include "amodelay_cli/manifest.hpp"

namespace amodelay::cli {

namespace {

using nlohmann::json;

struct Globals {
    std::string config;
    std::string out = ".";
    std::string variant;
    double eps = 0.0;
    int n = 0;
    double alpha = 0.0;
    double t_end = 0.0;
    std::uint64_t seed = 1;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

struct Context {
    const Globals& g;
    std::ostream& out;
    ModelConfig cfg;
    RunManifest manifest;

    Context(const Globals& globals, std::ostream& o, const std::string& command) : g(globals), out(o) {
        if (!g.config.empty()) cfg = load_model_config(g.config);
        if (g.alpha_opt->count() > 0) cfg.alpha = g.alpha;
        std::filesystem::create_directories(g.out);
        manifest.command = command;
        manifest.config = cfg;
        if (g.seed_opt->count() > 0) manifest.seed = g.seed;
    }

    std::string path(const std::string& name) {
        manifest.outputs.push_back(name);
        return (std::filesystem::path(g.out) / name).string();
    }

    int n_or(int fallback) const { return g.n > 0 ? g.n : fallback; }
    double t_end_or(double fallback) const { return g.t_end > 0 ? g.t_end : fallback; }

    /// Writes the resolved config (loadable with --config) and the manifest.
    void finish(const ModelCoeffs& c) {
        std::string base = manifest.command;
        std::replace(base.begin(), base.end(), ' ', '_');
        {
            std::ofstream f(path(base + ".config.json"));
            f << model_config_to_json(cfg) << '\n';
        }
        manifest.derived = derived_constants(c);
        const std::string name = write_manifest(manifest, g.out);
        out << "wrote " << manifest.outputs.size() + 1 << " files to " << g.out << " (" << name << ")\n";
    }
};

double auto_dt(const ModelCoeffs& c, int N, ModelVariant v, double requested) {
    if (requested > 0) return requested;
    const Grid probe{N, 1.0};
    return std::min(0.0025, 0.5 * max_stable_dt(c, probe, v));
}

void print_peaks(std::ostream& out, const SpectrumResult& s, std::size_t count = 5) {
    out << "  period (yr)   frequency (1/yr)   power\n";
    for (std::size_t i = 0; i < std::min(count, s.peaks.size()); ++i) {
        const Peak& p = s.peaks[i];
        out << "  " << std::setw(11) << std::fixed << std::setprecision(3) << p.period() << "   " << std::setw(16)
            << std::setprecision(5) << p.frequency << "   " << std::scientific << std::setprecision(4) << p.power
            << '\n';
    }
    out << std::defaultfloat << "  frequency resolution " << s.df << " 1/yr\n";
}

// ---- coeffs ----

int cmd_coeffs(Context& ctx, bool extended) {
    ModelCoeffs c = coeffs_from_config(ctx.cfg);
    if (extended && !ctx.cfg.betas) c = with_betas(c, kFigureBeta13, kFigureBeta2, kFigureBeta13);
    const WaveStructure ws = derive_wave_structure(c);
    const std::vector<std::pair<std::string, double>> rows = {
        {"a1", c.a1},           {"b1", c.b1},           {"c1", c.c1},           {"a2", c.a2},
        {"b2", c.b2},           {"c2", c.c2},           {"kappa_s", c.kappa_s}, {"alpha", c.alpha},
        {"beta1", c.beta1},     {"beta2", c.beta2},     {"beta3", c.beta3},     {"l_plus", ws.l_plus},
        {"l_minus", ws.l_minus}, {"tau_plus", ws.tau_plus}, {"tau_minus", ws.tau_minus}};
    std::ofstream f(ctx.path("coeffs.csv"));
    f << "quantity,value\n";
    for (const auto& [k, v] : rows) {
        f << k << ',' << format_double(v) << '\n';
        ctx.out << std::left << std::setw(10) << k << std::right << ' ' << format_double(v) << '\n';
    }
    if (extended) {
        const ExpansionCoeffs e = expansion_coeffs(c);
        ctx.out << "l1_plus    " << format_double(e.l1_plus) << "\nl1_minus   " << format_double(e.l1_minus) << '\n';
    }
    ctx.manifest.numerics["extended"] = extended;
    ctx.finish(c);
    return kExitOk;
}

// ---- simulate ----

struct SimulateArgs {
    double dt = 0.0;
    int sample_every = 0;
    bool zero_ic = false;
    bool extended = false;
};

int cmd_simulate(Context& ctx, const SimulateArgs& a) {
    ModelVariant v = ctx.g.variant.empty() ? ModelVariant::two_layer : model_variant_from_string(ctx.g.variant);
    if (a.extended) v = ModelVariant::extended;
    ModelCoeffs c = coeffs_from_config(ctx.cfg);
    if (v == ModelVariant::extended && !ctx.cfg.betas) c = with_betas(c, kFigureBeta13, kFigureBeta2, kFigureBeta13);
    Grid g;
    g.N = ctx.n_or(400);
    g.dt = auto_dt(c, g.N, v, a.dt);
    g.validate();
    SimulationOptions o;
    o.t_end = ctx.t_end_or(200.0);
    o.sample_every = a.sample_every > 0 ? a.sample_every : std::max(1, static_cast<int>(std::lround(0.05 / g.dt)));

    const FieldState ic = a.zero_ic ? zero_state(g, v) : init_gaussian(g, GaussianPulse{}, v);
    FieldState final_state;
    const Trajectory tr = simulate(ic, c, g, v, o, &final_state);
    write_trajectory_csv(tr, ctx.path("simulate_trajectory.csv"));
    write_field_csv(final_state, ctx.path("simulate_final_field.csv"));
    ctx.manifest.numerics = {{"variant", to_string(v)}, {"N", g.N},          {"dt", g.dt},
                             {"t_end", o.t_end},        {"sample_every", o.sample_every},
                             {"probe", o.probe},        {"initial_condition", a.zero_ic ? "zero" : "gaussian"}};
    if (!a.zero_ic) {
        const SpectrumResult s = psd(tr, 1);
        write_spectrum_csv(s, ctx.path("simulate_spectrum.csv"));
        ctx.out << "surface layer spectrum at x = 0\n";
        print_peaks(ctx.out, s);
    }
    ctx.finish(c);
    return kExitOk;
}

// ---- delay ----

struct DelayArgs {
    double dt = 0.0;
    std::string correction = "published";
    bool zero_ic = false;
};

LaplaceCorrection correction_from_string(const std::string& s) {
    if (s == "published") return LaplaceCorrection::published;
    if (s == "exact_moments" || s == "exact") return LaplaceCorrection::exact_moments;
    throw ConfigError("unknown correction '" + s + "'");
}

int cmd_delay(Context& ctx, const DelayArgs& a) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    DelayRunSetup s;
    s.variant = ctx.g.variant.empty() ? DelayVariant::dde_moc : delay_variant_from_string(ctx.g.variant);
    s.N = ctx.n_or(400);
    s.dt = auto_dt(c, s.N, ModelVariant::two_layer, a.dt);
    s.eps = ctx.g.eps;
    s.correction = correction_from_string(a.correction);
    s.t_end = ctx.t_end_or(200.0);
    s.zero_ic = a.zero_ic;
    const double eps = s.eps > 0 ? s.eps : 1.0 / s.N;
    const double spacing = s.variant == DelayVariant::difference ? s.dt : eps / 10.0;
    s.stride = std::max(1, static_cast<int>(std::lround(0.01 / spacing)));

    const DelayRun run = run_delay_model(c, s);
    write_trajectory_csv(run.traj, ctx.path("delay_trajectory.csv"));
    ctx.manifest.numerics = {{"variant", to_string(s.variant)},
                             {"eps", run.eps},
                             {"warmup_N", s.N},
                             {"warmup_dt", s.dt},
                             {"history_spacing", run.buffer.spacing()},
                             {"t_end", s.t_end},
                             {"stride", s.stride},
                             {"correction", to_string(s.correction)},
                             {"initial_condition", a.zero_ic ? "zero" : "gaussian"}};
    if (!a.zero_ic) {
        for (int layer : {1, 2}) {
            const SpectrumResult sp = psd(run.traj, layer);
            write_spectrum_csv(sp, ctx.path("delay_spectrum_T" + std::to_string(layer) + ".csv"));
            ctx.out << "layer " << layer << " spectrum (" << to_string(s.variant) << ", eps = " << run.eps << ")\n";
            print_peaks(ctx.out, sp);
        }
    }
    ctx.finish(c);
    return kExitOk;
}

// ---- analyze ----

int analyze_eigen(Context& ctx) {
    const ModelCoeffs c = with_betas(coeffs_from_config(ctx.cfg), 0.0, 0.0, 0.0);
    const int N = ctx.n_or(32);
    const EigenSet cf = discrete_eigen_closed_form(c, N);
    write_eigen_csv(cf, ctx.path("eigen_closed_form.csv"));
    double max_re = -INFINITY;
    for (const Complex& z : cf.values) max_re = std::max(max_re, z.real());
    ctx.out << "closed form: " << cf.values.size() << " eigenvalues, max Re = " << max_re << '\n';
    ctx.manifest.numerics = {{"N", N}, {"max_real_part", max_re}};
    if (N <= 128) {
        const EigenSet qr = dense_eigensolver(build_system_matrix(c, N, ModelVariant::two_layer));
        if (!qr.converged) throw NumericalError("dense QR did not converge");
        write_eigen_csv(qr, ctx.path("eigen_qr.csv"));
        const double d = multiset_distance(cf.values, qr.values);
        ctx.out << "dense QR: multiset distance to closed form " << d << '\n';
        ctx.manifest.numerics["qr_distance"] = d;
    }
    write_eigen_csv(exact_pde_eigen(derive_wave_structure(c), c.alpha, 10), ctx.path("eigen_exact_pde.csv"));
    ctx.finish(c);
    return kExitOk;
}

int analyze_asymptotic(Context& ctx) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    const WaveStructure ws = derive_wave_structure(c);
    const double eps = ctx.g.eps > 0 ? ctx.g.eps : 1.0 / ctx.n_or(400);
    std::vector<double> omegas, phis;
    for (int i = 1; i <= 200; ++i) omegas.push_back(0.05 * i);
    for (int j = 0; j < 64; ++j) phis.push_back(2 * std::numbers::pi * j / 64);
    write_asymptotic_csv(asymptotic_spectrum(ws, c.alpha, eps, omegas, phis), ctx.path("asymptotic.csv"));

    const DelaySystem sys = make_delay_system(c, DelayVariant::dde_moc, eps);
    std::vector<Complex> guesses;
    for (double l : {ws.l_plus, ws.l_minus})
        for (int k = 0; k < 20; ++k) guesses.emplace_back(-c.alpha, std::numbers::pi * (2 * k + 1) * l);
    const CharRootsResult r = char_roots(sys, guesses);
    EigenSet roots;
    roots.label = "dde_moc";
    for (const CharRoot& cr : r.roots) roots.values.push_back(cr.lambda);
    write_eigen_csv(roots, ctx.path("char_roots.csv"));
    ctx.out << r.roots.size() << " characteristic roots, " << r.failed.size() << " guesses failed\n";
    ctx.manifest.numerics = {{"eps", eps}, {"omegas", omegas.size()}, {"phis", phis.size()}};
    ctx.finish(c);
    return kExitOk;
}

int analyze_bc_error(Context& ctx) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    const std::vector<int> Ns = {100, 200, 400, 800};
    const BcErrorStudy st = bc_error_study(c, Ns);
    CsvWriter w(ctx.path("bc_error.csv"), {"N", "eps", "disc_pde", "moc", "mz"});
    for (std::size_t i = 0; i < Ns.size(); ++i) w.row({double(Ns[i]), 1.0 / Ns[i], st.disc[i], st.moc[i], st.mz[i]});
    ctx.out << "log-log slopes: disc_pde " << st.slope_disc << ", moc " << st.slope_moc << ", mz " << st.slope_mz
            << '\n';
    ctx.manifest.numerics = {{"Ns", Ns}, {"branch", "minus"}, {"k", 0}};
    ctx.finish(c);
    return kExitOk;
}

int analyze_error_terms(Context& ctx, bool self_consistent) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    const std::vector<int> Ns = {500, 1000, 2000};
    const double t_end = ctx.t_end_or(200.0);
    const ErrorTermStudy st = error_term_study(c, Ns, self_consistent, t_end);
    {
        std::vector<std::string> header = {"N", "max_abs"};
        if (self_consistent) header.push_back("self_consistent_max_abs");
        CsvWriter w(ctx.path("error_terms.csv"), header);
        for (std::size_t i = 0; i < Ns.size(); ++i) {
            std::vector<double> row = {double(Ns[i]), st.max_abs[i]};
            if (self_consistent) row.push_back(st.self_max_abs[i]);
            w.row(row);
        }
    }
    {
        CsvWriter w(ctx.path("error_terms_series.csv"), {"t", "f1", "f2"});
        for (std::size_t i = 0; i < st.series.size(); ++i) w.row({st.series.t[i], st.series.T1[i], st.series.T2[i]});
    }
    write_spectrum_csv(psd(st.series, 1), ctx.path("error_terms_spectrum.csv"));
    ctx.out << "max |eps f_eps| ratios:";
    for (double r : st.ratios) ctx.out << ' ' << r;
    if (self_consistent) {
        ctx.out << "\nself-consistent ratios:";
        for (double r : st.self_ratios) ctx.out << ' ' << r;
    }
    ctx.out << "\nf_eps spectral peak " << st.peak_frequency << " 1/yr (bin " << st.df << ")\n";
    ctx.manifest.numerics = {{"Ns", Ns}, {"reference_eps", 1.0 / 400}, {"t_end", t_end},
                             {"self_consistent", self_consistent}};
    ctx.finish(c);
    return kExitOk;
}

int analyze_kernel(Context& ctx) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    const int N = ctx.n_or(16);
    const WaveStructure ws = derive_wave_structure(c);
    std::vector<double> times;
    const double span = 2.0 * ws.tau_minus;
    for (int i = 0; i <= 600; ++i) times.push_back(span * i / 600);
    write_kernel_csv(c, N, times, ctx.path("kernel.csv"));

    std::mt19937_64 rng(ctx.g.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z0(2 * (N - 1));
    for (Eigen::Index i = 0; i < z0.size(); ++i) z0(i) = normal(rng);
    write_noise_csv(c, N, z0, times, ctx.path("noise.csv"));
    ctx.manifest.seed = ctx.g.seed;
    ctx.manifest.numerics = {{"N", N}, {"times", times.size()}, {"t_max", span}};

    if (N <= 64) {
        const KernelOracle oracle(c, N);
        double worst = 0, scale = 0;
        for (int k = 0; k < 20; ++k) {
            const double s = 0.01 * std::pow(10.0, 3.0 * k / 19.0);
            const Eigen::MatrixXd ref = oracle.kernel(s);
            const Mat2 K = memory_kernel(c, N, s);
            worst = std::max(worst, (K - ref).cwiseAbs().maxCoeff());
            scale = std::max(scale, ref.cwiseAbs().maxCoeff());
        }
        ctx.out << "closed-form kernel vs matrix exponential: max error / peak = " << worst / scale << '\n';
        ctx.manifest.numerics["oracle_relative_error"] = worst / scale;
    }
    ctx.finish(c);
    return kExitOk;
}

int analyze_sensitivity(Context& ctx) {
    const ModelCoeffs c = coeffs_from_config(ctx.cfg);
    const auto rows = sensitivity_table(ctx.cfg.physical, kSensitivityWidthsKm);
    CsvWriter w(ctx.path("sensitivity.csv"), {"W_km", "two_tau_minus", "two_thirds_tau_minus", "two_tau_plus"});
    ctx.out << "  W (km)   2tau- (yr)   (2/3)tau- (yr)   2tau+ (yr)\n" << std::fixed << std::setprecision(2);
    for (const auto& r : rows) {
        w.row({r.W_km, r.two_tau_minus, r.two_thirds_tau_minus, r.two_tau_plus});
        ctx.out << "  " << std::setw(6) << r.W_km << "   " << std::setw(10) << r.two_tau_minus << "   "
                << std::setw(14) << r.two_thirds_tau_minus << "   " << std::setw(10) << r.two_tau_plus << '\n';
    }
    ctx.out << std::defaultfloat;
    ctx.manifest.numerics = {{"widths_km", kSensitivityWidthsKm}};
    ctx.finish(c);
    return kExitOk;
}

// ---- ingest ----

int cmd_ingest(Context& ctx, const std::string& input, std::size_t window) {
    const IndexSeries raw = load_index(input);
    const IndexSeries sm = running_mean(raw, window);
    write_index_csv(raw, sm, ctx.path("ingest_index.csv"));
    const std::vector<double> run = longest_valid_run(sm);
    ctx.out << raw.size() << " monthly records, " << raw.valid_count() << " valid; longest smoothed run "
            << run.size() << " months\n";
    ctx.manifest.numerics = {{"input", std::filesystem::path(input).filename().string()},
                             {"window", window},
                             {"centered", true},
                             {"records", raw.size()},
                             {"longest_run", run.size()}};
    if (run.size() >= 8) {
        const SpectrumResult s = psd(run, 1.0 / 12.0);
        write_spectrum_csv(s, ctx.path("ingest_spectrum.csv"));
        print_peaks(ctx.out, s);
    }
    ctx.finish(coeffs_from_config(ctx.cfg));
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay-equation laboratory for a two-layer multidecadal ocean model"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    Globals g;
    app.add_option("--config", g.config, "JSON model configuration");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--variant", g.variant, "Model variant (PDE: two_layer|extended|three_layer; delay: difference|moc|mz)");
    app.add_option("--eps", g.eps, "Smoothing parameter (default 1/N)");
    app.add_option("--n", g.n, "Number of grid intervals");
    g.alpha_opt = app.add_option("--alpha", g.alpha, "Damping rate (1/yr)");
    app.add_option("--t-end", g.t_end, "Run length (yr)");
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for randomized initial data");

    bool coeffs_extended = false;
    auto* coeffs = app.add_subcommand("coeffs", "Nondimensional coefficients and wave structure");
    coeffs->add_flag("--extended", coeffs_extended, "Include the background-overturning betas");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Integrate the upwind PDE and record x = 0");
    sim->add_option("--dt", sa.dt, "Time step (default: stable automatic choice)");
    sim->add_option("--sample-every", sa.sample_every, "Record every k-th step");
    sim->add_flag("--zero-ic", sa.zero_ic, "Start from rest");
    sim->add_flag("--extended", sa.extended, "Extended model with background overturning");

    DelayArgs da;
    auto* delay = app.add_subcommand("delay", "PDE warmup followed by a delay model run");
    delay->add_option("--dt", da.dt, "Warmup time step");
    delay->add_option("--correction", da.correction, "published|exact_moments")
        ->check(CLI::IsMember({"published", "exact_moments", "exact"}));
    delay->add_flag("--zero-ic", da.zero_ic, "Zero history");

    std::string what;
    bool self_consistent = false;
    auto* analyze = app.add_subcommand("analyze", "Spectral and error analyses");
    analyze->add_option("what", what, "eigen|asymptotic|bc_error|error_terms|kernel|sensitivity")
        ->required()
        ->check(CLI::IsMember({"eigen", "asymptotic", "bc_error", "error_terms", "kernel", "sensitivity"}));
    analyze->add_flag("--self-consistent", self_consistent, "error_terms: also evaluate on a run at eps = 1/N");

    std::string input;
    std::size_t window = 12;
    auto* ingest = app.add_subcommand("ingest", "Parse a monthly index file, smooth and analyze it");
    ingest->add_option("path", input, "Index file")->required();
    ingest->add_option("--window", window, "Running-mean window (months)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*coeffs) {
            Context ctx(g, out, "coeffs");
            return cmd_coeffs(ctx, coeffs_extended);
        }
        if (*sim) {
            Context ctx(g, out, "simulate");
            return cmd_simulate(ctx, sa);
        }
        if (*delay) {
            Context ctx(g, out, "delay");
            return cmd_delay(ctx, da);
        }
        if (*analyze) {
            Context ctx(g, out, "analyze " + what);
            if (what == "eigen") return analyze_eigen(ctx);
            if (what == "asymptotic") return analyze_asymptotic(ctx);
            if (what == "bc_error") return analyze_bc_error(ctx);
            if (what == "error_terms") return analyze_error_terms(ctx, self_consistent);
            if (what == "kernel") return analyze_kernel(ctx);
            return analyze_sensitivity(ctx);
        }
        Context ctx(g, out, "ingest");
        return cmd_ingest(ctx, input, window);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace amodelay::cli
