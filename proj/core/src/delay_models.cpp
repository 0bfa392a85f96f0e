#include "amodelay/delay_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amodelay/errors.hpp"

namespace amodelay {

std::string to_string(DelayVariant v) {
    switch (v) {
        case DelayVariant::difference: return "difference";
        case DelayVariant::dde_moc: return "dde_moc";
        case DelayVariant::dde_mz: return "dde_mz";
    }
    return "unknown";
}

DelayVariant delay_variant_from_string(const std::string& s) {
    if (s == "difference") return DelayVariant::difference;
    if (s == "dde_moc" || s == "moc") return DelayVariant::dde_moc;
    if (s == "dde_mz" || s == "mz") return DelayVariant::dde_mz;
    throw ConfigError("unknown delay variant '" + s + "'");
}

Mat2 DelaySystem::D_plus() const { return std::exp(-alpha * ws.tau_plus) * ws.C1; }
Mat2 DelaySystem::D_minus() const { return std::exp(-alpha * ws.tau_minus) * ws.C2; }

DelaySystem make_delay_system(const ModelCoeffs& c, DelayVariant v, double eps,
                              LaplaceCorrection corr) {
    DelaySystem s;
    s.variant = v;
    s.ws = derive_wave_structure(c);
    if (!(s.ws.l_minus > 0.0)) throw DegenerateCharacteristics("delay models need positive speeds");
    s.alpha = c.alpha;
    if (v != DelayVariant::difference && !(eps > 0.0))
        throw ConfigError("eps must be positive for the dde variants");
    s.eps = v == DelayVariant::difference ? 0.0 : eps;
    s.mz = laplace_limit(c, corr);
    return s;
}

HistoryBuffer warmup_history(const ModelCoeffs& c, const Grid& grid, const FieldState& ic,
                             const WarmupOptions& opts) {
    const WaveStructure ws = derive_wave_structure(c);
    const double duration = opts.duration > 0.0 ? opts.duration : ws.tau_minus;
    if (duration < ws.tau_minus * (1.0 - 1e-12))
        throw ConfigError("warmup must cover at least tau- years");
    const double spacing = opts.spacing > 0.0 ? opts.spacing : grid.dt;
    const double run = std::ceil((duration + 2.0 * spacing) / grid.dt + 1.0) * grid.dt;

    SimulationOptions so;
    so.t_end = run;
    so.sample_every = 1;
    so.probe = opts.probe;
    Trajectory tr = simulate(ic, c, grid, opts.variant, so);
    const double t_last = tr.t.back();
    for (double& t : tr.t) t -= t_last;
    return HistoryBuffer::resample(tr, spacing, 0.0);
}

Vec2 step_difference(const HistoryBuffer& h, const DelaySystem& sys, double t) {
    return sys.D_plus() * h.at(t - sys.ws.tau_plus) + sys.D_minus() * h.at(t - sys.ws.tau_minus);
}

namespace {

Vec2 delayed_g(const HistoryBuffer& h, double t, double tau, const std::array<double, 3>& g) {
    const double s = t - tau;
    return g[0] * h.at(s) + g[1] * h.derivative(s) + g[2] * h.second_derivative(s);
}

// Number of Euler steps per buffer sample; throws when the ratio is not an
// integer.
long long substeps(double spacing, double step) {
    const double r = spacing / step;
    const long long m = std::llround(r);
    if (m < 1 || std::abs(r - static_cast<double>(m)) > 1e-6 * r)
        throw ConfigError("Euler step must divide the history spacing");
    return m;
}

}  // namespace

Vec2 error_functional(const HistoryBuffer& h, const DelaySystem& sys, double t) {
    const DelayCoefficients& d = sys.mz;
    return d.markov_eps * h.at(t) + d.G_plus * delayed_g(h, t, d.tau_plus, d.g_plus) +
           d.G_minus * delayed_g(h, t, d.tau_minus, d.g_minus);
}

Vec2 error_terms(const HistoryBuffer& h, const DelaySystem& sys, double t, int N) {
    if (N < 1) throw ConfigError("error_terms needs N >= 1");
    return error_functional(h, sys, t) / static_cast<double>(N);
}

Trajectory integrate_dde(HistoryBuffer& h, const DelaySystem& sys, const IntegrateOptions& opts) {
    if (h.empty()) throw ConfigError("integrate_dde needs a non-empty history");
    if (!(opts.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    const double tau_p = sys.ws.tau_plus, tau_m = sys.ws.tau_minus;
    const double sp = h.spacing();
    const double sp_max = (sys.variant == DelayVariant::difference ? tau_p : std::min(tau_p, sys.eps)) / 10.0;
    if (sp > sp_max * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "history spacing " << sp << " exceeds min(tau+, eps)/10 = " << sp_max;
        throw ConfigError(os.str());
    }
    const double t_start = h.t_end();
    const double need = sys.variant == DelayVariant::dde_mz ? tau_m + sp : tau_m;
    if (!h.covers(t_start - need)) {
        std::ostringstream os;
        os << "history underflow: buffer starts at " << h.t_begin() << " but the delay model needs "
           << t_start - need;
        throw NumericalError(os.str());
    }
    const auto samples = static_cast<long long>(std::llround(opts.t_end / sp));

    Trajectory out;
    out.push(t_start, h.back());
    h.reserve(h.size() + static_cast<std::size_t>(samples));

    if (sys.variant == DelayVariant::difference) {
        for (long long k = 1; k <= samples; ++k) {
            const double t = t_start + static_cast<double>(k) * sp;
            const Vec2 v = step_difference(h, sys, t);
            h.push_back(v);
            out.push(t, v);
        }
        return out;
    }

    const double eps = sys.eps;
    const double step = opts.step > 0.0 ? opts.step : eps / 10.0;
    if (step > eps / 5.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "step " << step << " exceeds the stiffness bound eps/5 = " << eps / 5.0;
        throw ConfigError(os.str());
    }
    const long long m = substeps(sp, step);
    const double dt = sp / static_cast<double>(m);

    // Leading-order continuation that carries the dde_mz forcing.
    HistoryBuffer ref;
    if (sys.variant == DelayVariant::dde_mz) {
        ref = h;
        for (long long k = 1; k <= samples + 2; ++k)
            ref.push_back(step_difference(ref, sys, t_start + static_cast<double>(k) * sp));
    }

    const Mat2 Dp = sys.D_plus(), Dm = sys.D_minus();
    const DelayCoefficients& d = sys.mz;
    Vec2 T = h.back();
    for (long long k = 0; k < samples; ++k) {
        const double tk = t_start + static_cast<double>(k) * sp;
        for (long long j = 0; j < m; ++j) {
            const double t = tk + static_cast<double>(j) * dt;
            Vec2 rhs;
            if (sys.variant == DelayVariant::dde_moc) {
                rhs = -T + Dp * h.at(t - tau_p) + Dm * h.at(t - tau_m);
            } else {
                rhs = d.markov * T + d.G_plus * h.at(t - tau_p) + d.G_minus * h.at(t - tau_m) +
                      eps * error_functional(ref, sys, t);
            }
            T += (dt / eps) * rhs;
        }
        if (!T.allFinite()) {
            std::ostringstream os;
            os << "delay model diverged at t=" << tk + sp;
            throw NumericalError(os.str());
        }
        h.push_back(T);
        out.push(tk + sp, T);
    }
    return out;
}

CMat2 characteristic_matrix(const DelaySystem& sys, Complex lambda) {
    const CMat2 I = CMat2::Identity();
    const double eps = sys.variant == DelayVariant::difference ? 0.0 : sys.eps;
    if (sys.variant == DelayVariant::dde_mz) {
        const DelayCoefficients& d = sys.mz;
        auto branch = [&](const Mat2& G, double tau, const std::array<double, 3>& g) -> CMat2 {
            const Complex q = g[0] + g[1] * lambda + g[2] * lambda * lambda;
            return G.cast<Complex>() * (std::exp(-lambda * tau) * (1.0 + eps * q));
        };
        return -eps * lambda * I + d.markov.cast<Complex>() + eps * d.markov_eps.cast<Complex>() +
               branch(d.G_plus, d.tau_plus, d.g_plus) + branch(d.G_minus, d.tau_minus, d.g_minus);
    }
    const Complex ep = std::exp(-(sys.alpha + lambda) * sys.ws.tau_plus);
    const Complex em = std::exp(-(sys.alpha + lambda) * sys.ws.tau_minus);
    return -eps * lambda * I - I + sys.ws.C1.cast<Complex>() * ep + sys.ws.C2.cast<Complex>() * em;
}

CMat2 characteristic_matrix_derivative(const DelaySystem& sys, Complex lambda) {
    const CMat2 I = CMat2::Identity();
    const double eps = sys.variant == DelayVariant::difference ? 0.0 : sys.eps;
    if (sys.variant == DelayVariant::dde_mz) {
        const DelayCoefficients& d = sys.mz;
        auto branch = [&](const Mat2& G, double tau, const std::array<double, 3>& g) -> CMat2 {
            const Complex q = g[0] + g[1] * lambda + g[2] * lambda * lambda;
            const Complex dq = g[1] + 2.0 * g[2] * lambda;
            const Complex e = std::exp(-lambda * tau);
            return G.cast<Complex>() * (e * (-tau * (1.0 + eps * q) + eps * dq));
        };
        return -eps * I + branch(d.G_plus, d.tau_plus, d.g_plus) +
               branch(d.G_minus, d.tau_minus, d.g_minus);
    }
    const double tp = sys.ws.tau_plus, tm = sys.ws.tau_minus;
    const Complex ep = std::exp(-(sys.alpha + lambda) * tp);
    const Complex em = std::exp(-(sys.alpha + lambda) * tm);
    return -eps * I - tp * ep * sys.ws.C1.cast<Complex>() - tm * em * sys.ws.C2.cast<Complex>();
}

}  // namespace amodelay
