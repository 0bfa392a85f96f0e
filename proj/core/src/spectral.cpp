#include "amodelay/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "amodelay/csv.hpp"
#include "amodelay/errors.hpp"
#include "amodelay/fft.hpp"
#include "amodelay/pde_sim.hpp"

namespace amodelay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPeakFraction = 0.05;
constexpr std::size_t kPeakSeparation = 2;
constexpr double kRootGate = 1e-8;

double wrap_to_period(double lag, double period) {
    double r = std::fmod(lag, period);
    if (r <= -0.5 * period) r += period;
    if (r > 0.5 * period) r -= period;
    return r;
}

Complex single_bin(std::span<const double> x, double dt, double f) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    Complex acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        acc += (x[j] - mean) * std::polar(1.0, -2.0 * kPi * f * dt * static_cast<double>(j));
    return acc;
}

Complex det2(const CMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

CMat2 adj2(const CMat2& m) {
    CMat2 a;
    a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return a;
}

}  // namespace

std::string to_string(Window w) { return w == Window::hann ? "hann" : "none"; }

Window window_from_string(const std::string& s) {
    if (s == "hann") return Window::hann;
    if (s == "none") return Window::none;
    throw ConfigError("unknown window '" + s + "'");
}

SpectrumResult psd(std::span<const double> x, double dt, Window window) {
    const std::size_t n = x.size();
    if (n < 64) throw ConfigError("psd needs at least 64 samples");
    if (!(dt > 0.0)) throw ConfigError("psd needs a positive sampling interval");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> w(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double taper = 1.0;
        if (window == Window::hann)
            taper = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n - 1)));
        w[j] = (x[j] - mean) * taper;
        var += w[j] * w[j];
    }

    SpectrumResult r;
    r.dt = dt;
    r.window = window;
    r.n_samples = n;
    r.n_fft = next_pow2(n);
    r.df = 1.0 / (static_cast<double>(r.n_fft) * dt);
    r.windowed_variance = var / static_cast<double>(n);

    const std::vector<Complex> X = real_dft(w, r.n_fft);
    const std::size_t nb = X.size();
    r.freqs.resize(nb);
    r.psd.resize(nb);
    const double scale = dt / static_cast<double>(n);
    for (std::size_t k = 0; k < nb; ++k) {
        const bool edge = k == 0 || 2 * k == r.n_fft;
        r.freqs[k] = static_cast<double>(k) * r.df;
        r.psd[k] = std::norm(X[k]) * scale * (edge ? 1.0 : 2.0);
    }

    const double top = *std::max_element(r.psd.begin(), r.psd.end());
    std::vector<Peak> cand;
    for (std::size_t k = 1; k + 1 < nb; ++k) {
        if (r.psd[k] > r.psd[k - 1] && r.psd[k] >= r.psd[k + 1] && r.psd[k] > kPeakFraction * top)
            cand.push_back({r.freqs[k], r.psd[k], k});
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const Peak& a, const Peak& b) { return a.power > b.power; });
    for (const Peak& p : cand) {
        const bool clear = std::none_of(r.peaks.begin(), r.peaks.end(), [&](const Peak& q) {
            return (p.bin > q.bin ? p.bin - q.bin : q.bin - p.bin) < kPeakSeparation;
        });
        if (clear) r.peaks.push_back(p);
    }
    return r;
}

SpectrumResult psd(const Trajectory& traj, int layer, Window window) {
    if (traj.size() < 64) throw ConfigError("psd needs at least 64 samples");
    if (layer != 1 && layer != 2) throw ConfigError("layer must be 1 or 2");
    const double span = traj.t.back() - traj.t.front();
    const double dt = span / static_cast<double>(traj.size() - 1);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double d = traj.t[i] - traj.t[i - 1];
        if (std::abs(d - dt) > 1e-6 * dt) {
            std::ostringstream os;
            os << "non-uniform sampling at index " << i << " (step " << d << ", expected " << dt << ")";
            throw ConfigError(os.str());
        }
    }
    return psd(traj.component(layer), dt, window);
}

const Peak* nearest_peak(const SpectrumResult& s, double f) {
    const Peak* best = nullptr;
    for (const Peak& p : s.peaks)
        if (!best || std::abs(p.frequency - f) < std::abs(best->frequency - f)) best = &p;
    return best;
}

double phase_lag(std::span<const double> x, std::span<const double> y, double dt, double f) {
    if (x.size() != y.size() || x.empty()) throw ConfigError("phase_lag needs equal, non-empty series");
    if (!(f > 0.0)) throw ConfigError("phase_lag needs a positive frequency");
    const Complex X = single_bin(x, dt, f);
    const Complex Y = single_bin(y, dt, f);
    const double lag = -std::arg(Y * std::conj(X)) / (2.0 * kPi * f);
    return wrap_to_period(lag, 1.0 / f);
}

Complex discrete_eigenvalue(const ModelCoeffs& c, int N, Branch b, int k) {
    if (N < 1) throw ConfigError("N must be positive");
    const Speeds s = characteristic_speeds(c.a1, c.b1, c.a2, c.b2);
    const double l = b == Branch::plus ? s.l_plus : s.l_minus;
    const Complex rho = std::polar(1.0, kPi * (2.0 * k + 1.0) / N);
    return -c.alpha + l * N * (rho - 1.0);
}

EigenSet discrete_eigen_closed_form(const ModelCoeffs& c, int N, bool with_vectors) {
    if (N < 1) throw ConfigError("N must be positive");
    const WaveStructure ws = derive_wave_structure(c);
    EigenSet e;
    e.label = "full_disc";
    Eigen::MatrixXd M;
    if (with_vectors) M = build_system_matrix(c, N, ModelVariant::two_layer);
    for (Branch b : {Branch::plus, Branch::minus}) {
        const Vec2 v = (b == Branch::plus ? ws.v_plus : ws.v_minus).normalized();
        for (int k = 0; k < N; ++k) {
            const Complex lambda = discrete_eigenvalue(c, N, b, k);
            e.values.push_back(lambda);
            if (!with_vectors) continue;
            const Complex rho = std::polar(1.0, kPi * (2.0 * k + 1.0) / N);
            Eigen::VectorXcd vec(2 * N);
            Complex p = 1.0;
            for (int n = 0; n < N; ++n, p *= rho) {
                vec(2 * n) = p * v(0);
                vec(2 * n + 1) = p * v(1);
            }
            vec /= vec.norm();
            e.residuals.push_back((M.cast<Complex>() * vec - lambda * vec).norm());
            e.vectors.push_back(std::move(vec));
        }
    }
    return e;
}

CVec2 PdeEigenfunction::operator()(double x) const {
    return V0 * std::polar(1.0, kPi * (2.0 * k + 1.0) * x);
}

EigenSet exact_pde_eigen(const WaveStructure& ws, double alpha, int k_max,
                         std::vector<PdeEigenfunction>* functions) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    EigenSet e;
    e.label = "exact_pde";
    if (functions) functions->clear();
    for (Branch b : {Branch::plus, Branch::minus}) {
        const double l = b == Branch::plus ? ws.l_plus : ws.l_minus;
        const Vec2 v = b == Branch::plus ? ws.v_plus : ws.v_minus;
        for (int k = 0; k <= k_max; ++k) {
            const Complex lambda(-alpha, kPi * (2.0 * k + 1.0) * l);
            e.values.push_back(lambda);
            if (functions) {
                PdeEigenfunction f;
                f.lambda = lambda;
                f.branch = b;
                f.k = k;
                f.V0 = (v / v(0)).cast<Complex>();
                functions->push_back(f);
            }
        }
    }
    return e;
}

double char_residual(const DelaySystem& sys, Complex lambda) {
    return std::abs(det2(characteristic_matrix(sys, lambda)));
}

CharRootsResult char_roots(const DelaySystem& sys, std::span<const Complex> guesses,
                           const CharRootsOptions& opts) {
    if (sys.variant != DelayVariant::difference && !(sys.eps > 0.0))
        throw ConfigError("char_roots needs eps > 0");
    CharRootsResult out;
    for (std::size_t g = 0; g < guesses.size(); ++g) {
        Complex lam = guesses[g];
        bool ok = false;
        int it = 0;
        for (; it < opts.max_iterations; ++it) {
            const CMat2 M = characteristic_matrix(sys, lam);
            const Complex f = det2(M);
            const Complex df = (adj2(M) * characteristic_matrix_derivative(sys, lam)).trace();
            if (!std::isfinite(std::abs(f)) || df == Complex(0.0)) break;
            const Complex step = f / df;
            lam -= step;
            if (std::abs(step) <= opts.tolerance * std::max(1.0, std::abs(lam))) {
                ok = true;
                ++it;
                break;
            }
        }
        const double res = char_residual(sys, lam);
        if (!ok || !(res <= 1e-10)) {
            out.failed.push_back(g);
            continue;
        }
        const bool dup = std::any_of(out.roots.begin(), out.roots.end(), [&](const CharRoot& r) {
            return std::abs(r.lambda - lam) < opts.dedupe;
        });
        if (!dup) out.roots.push_back({lam, res, it});
    }
    return out;
}

std::array<Complex, 3> asymptotic_quadratic(const WaveStructure& ws, double omega, double phi) {
    const Complex I(0.0, 1.0);
    const CMat2 X = (-I * omega - 1.0) * CMat2::Identity() + ws.C1.cast<Complex>() * std::exp(I * phi);
    const CMat2 C = ws.C2.cast<Complex>();
    const Complex c0 = det2(X);
    const Complex c1 = X(0, 0) * C(1, 1) + X(1, 1) * C(0, 0) - X(0, 1) * C(1, 0) - X(1, 0) * C(0, 1);
    const Complex c2 = det2(C);
    return {c0, c1, c2};
}

std::vector<AsymptoticPoint> asymptotic_spectrum(const WaveStructure& ws, double alpha, double eps,
                                                 std::span<const double> omegas,
                                                 std::span<const double> phis) {
    if (!(eps > 0.0)) throw ConfigError("asymptotic spectrum needs eps > 0");
    if (omegas.empty() || phis.empty()) throw ConfigError("asymptotic spectrum needs non-empty grids");
    constexpr double tiny = 1e-12;
    std::vector<AsymptoticPoint> pts;
    pts.reserve(omegas.size() * phis.size());
    for (double phi : phis) {
        for (double omega : omegas) {
            AsymptoticPoint p;
            p.phi = phi;
            p.omega = omega;
            p.im_lambda = omega / eps;
            const auto [c0, c1, c2] = asymptotic_quadratic(ws, omega, phi);
            const double scale = 1.0 + std::abs(omega) * std::abs(omega);
            const bool lin = std::abs(c2) <= tiny * scale;
            const bool cst = lin && std::abs(c1) <= tiny * scale;
            if (cst) {
                p.degenerate = std::abs(c0) <= tiny * scale;
            } else if (lin) {
                p.n_roots = 1;
                p.z[0] = -c0 / c1;
            } else {
                const Complex d = std::sqrt(c1 * c1 - 4.0 * c0 * c2);
                const Complex q = -0.5 * (c1 + (std::real(std::conj(c1) * d) >= 0.0 ? d : -d));
                p.n_roots = 2;
                p.z[0] = q / c2;
                p.z[1] = q == Complex(0.0) ? Complex(0.0) : c0 / q;
            }
            bool all_zero = p.n_roots > 0;
            for (int i = 0; i < p.n_roots; ++i) {
                all_zero = all_zero && std::abs(p.z[i]) <= tiny;
                p.re_lambda[i] = -alpha - std::log(std::abs(p.z[i])) / ws.tau_minus;
            }
            if (all_zero) p.degenerate = true;
            pts.push_back(p);
        }
    }
    return pts;
}

std::string source_name(const BcSource& s) {
    if (std::holds_alternative<ExactPdeSource>(s)) return "exact";
    if (std::holds_alternative<DiscretePdeSource>(s)) return "disc_pde";
    const DelaySystem& sys = std::get<DelayModelSource>(s).sys;
    return sys.variant == DelayVariant::dde_mz ? "mz" : sys.variant == DelayVariant::dde_moc ? "moc" : "difference";
}

CVec2 reconstruct_eigenfunction(const WaveStructure& ws, double alpha, Complex lambda,
                                const CVec2& V0, double x) {
    const Complex s = lambda + alpha;
    return ws.P_plus().cast<Complex>() * (std::exp(s * ws.tau_plus * x) * V0) +
           ws.P_minus().cast<Complex>() * (std::exp(s * ws.tau_minus * x) * V0);
}

BcErrorResult eigenfunction_bc_error(Complex lambda, const WaveStructure& ws, double alpha,
                                     const BcSource& source) {
    BcErrorResult r;
    CVec2 v;
    if (const auto* e = std::get_if<ExactPdeSource>(&source)) {
        const double tau = e->branch == Branch::plus ? ws.tau_plus : ws.tau_minus;
        r.residual = std::abs(std::exp((lambda + alpha) * tau) + 1.0);
        v = (e->branch == Branch::plus ? ws.v_plus : ws.v_minus).cast<Complex>();
    } else if (const auto* d = std::get_if<DiscretePdeSource>(&source)) {
        if (d->N < 1) throw ConfigError("disc_pde source needs N >= 1");
        const double l = d->branch == Branch::plus ? ws.l_plus : ws.l_minus;
        const Complex rho = 1.0 + (lambda + alpha) / (l * d->N);
        r.residual = std::abs(std::pow(rho, d->N) + 1.0);
        v = (d->branch == Branch::plus ? ws.v_plus : ws.v_minus).cast<Complex>();
    } else {
        const DelaySystem& sys = std::get<DelayModelSource>(source).sys;
        const CMat2 M = characteristic_matrix(sys, lambda);
        r.residual = std::abs(det2(M));
        const int row = M.row(0).norm() >= M.row(1).norm() ? 0 : 1;
        v = CVec2(-M(row, 1), M(row, 0));
        if (v.norm() == 0.0) v = CVec2(1.0, 0.0);
    }
    if (!(r.residual <= kRootGate)) {
        std::ostringstream os;
        os << "lambda = " << lambda << " is not a root of the " << source_name(source)
           << " characteristic function (residual " << r.residual << ")";
        throw ConfigError(os.str());
    }
    if (std::abs(v(0)) == 0.0) throw NumericalError("eigenfunction has V1(0) = 0; cannot normalize");
    r.V0 = v / v(0);
    r.V1 = reconstruct_eigenfunction(ws, alpha, lambda, r.V0, 1.0);
    r.error = std::abs(r.V0(0) + r.V1(0));
    return r;
}

void write_eigen_csv(const EigenSet& e, const std::string& path) {
    CsvWriter w(path, {"re", "im", "label"});
    for (const Complex& z : e.values) w.row({z.real(), z.imag()}, e.label);
}

void write_spectrum_csv(const SpectrumResult& s, const std::string& path) {
    CsvWriter w(path, {"freq", "psd"});
    for (std::size_t k = 0; k < s.freqs.size(); ++k) w.row({s.freqs[k], s.psd[k]});
}

void write_asymptotic_csv(const std::vector<AsymptoticPoint>& pts, const std::string& path) {
    CsvWriter w(path, {"phi", "omega", "re_lambda", "branch"});
    for (const AsymptoticPoint& p : pts)
        for (int i = 0; i < p.n_roots; ++i) w.row({p.phi, p.omega, p.re_lambda[i]}, std::to_string(i));
}

}  // namespace amodelay
