#include "amodelay/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amodelay/csv.hpp"
#include "amodelay/errors.hpp"

namespace amodelay {

std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::two_layer: return "two_layer";
        case ModelVariant::three_layer: return "three_layer";
        case ModelVariant::extended: return "extended";
    }
    return "unknown";
}

ModelVariant model_variant_from_string(const std::string& s) {
    if (s == "two_layer") return ModelVariant::two_layer;
    if (s == "three_layer") return ModelVariant::three_layer;
    if (s == "extended") return ModelVariant::extended;
    throw ConfigError("unknown PDE variant '" + s + "'");
}

void Grid::validate() const {
    if (N < 4) throw ConfigError("grid needs N >= 4");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid needs dt > 0");
}

double max_stable_dt(const ModelCoeffs& c, const Grid& g, ModelVariant v) {
    const double lp = characteristic_speeds(c.a1, c.b1, c.a2, c.b2).l_plus;
    const double dx = g.dx();
    if (v == ModelVariant::three_layer) return 1.0 / (lp / dx + 2.0 * c.kappa_s / (dx * dx));
    return dx / lp;
}

namespace {

void check_cfl(const ModelCoeffs& c, const Grid& g, ModelVariant v) {
    const double bound = max_stable_dt(c, g, v);
    if (g.dt > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        if (v == ModelVariant::three_layer)
            os << "CFL violated: dt=" << g.dt << " exceeds 1/(l+/dx + 2 kappa_s/dx^2)=" << bound;
        else
            os << "CFL violated: dt=" << g.dt << " exceeds dx/l+=" << bound;
        throw ConfigError(os.str());
    }
}

// Writes the advanced state into `out` (same shape as `in`). Returns false
// when a non-finite value appears.
bool advance(const FieldState& in, FieldState& out, const ModelCoeffs& c, const Grid& g,
             ModelVariant v) {
    const int N = in.N();
    const double inv_dx = static_cast<double>(N);
    const double dt = g.dt;
    double check = 0.0;

    if (v == ModelVariant::three_layer) {
        const double kd = c.kappa_s * inv_dx * inv_dx;
        const double a[3][3] = {{c.a1, c.b1, c.c1}, {c.a2, c.b2, c.c2}, {0.0, 0.0, 0.0}};
        const std::vector<double>* src[3] = {&in.T1, &in.T2, &in.T3};
        std::vector<double>* dst[3] = {&out.T1, &out.T2, &out.T3};
        for (int n = 0; n < N; ++n) {
            double fwd[3], lap[3];
            for (int j = 0; j < 3; ++j) {
                const std::vector<double>& T = *src[j];
                const double prev = n > 0 ? T[n - 1] : -T[N - 1];
                fwd[j] = (T[n + 1] - T[n]) * inv_dx;
                lap[j] = T[n + 1] - 2.0 * T[n] + prev;
            }
            for (int i = 0; i < 3; ++i) {
                const double d = a[i][0] * fwd[0] + a[i][1] * fwd[1] + a[i][2] * fwd[2] + kd * lap[i];
                const double val = (*src[i])[n] + dt * d;
                (*dst[i])[n] = val;
                check += val;
            }
        }
        for (int i = 0; i < 3; ++i) (*dst[i])[N] = -(*dst[i])[0];
    } else {
        const bool ext = v == ModelVariant::extended;
        const double d1 = c.alpha + (ext ? c.beta1 : 0.0);
        const double d12 = ext ? c.beta2 : 0.0;
        const double d2 = c.alpha + (ext ? c.beta3 : 0.0);
        const double* T1 = in.T1.data();
        const double* T2 = in.T2.data();
        double* o1 = out.T1.data();
        double* o2 = out.T2.data();
        for (int n = 0; n < N; ++n) {
            const double g1 = (T1[n + 1] - T1[n]) * inv_dx;
            const double g2 = (T2[n + 1] - T2[n]) * inv_dx;
            const double r1 = c.a1 * g1 + c.b1 * g2 - d1 * T1[n] - d12 * T2[n];
            const double r2 = c.a2 * g1 + c.b2 * g2 - d2 * T2[n];
            o1[n] = T1[n] + dt * r1;
            o2[n] = T2[n] + dt * r2;
            check += o1[n] + o2[n];
        }
        o1[N] = -o1[0];
        o2[N] = -o2[0];
    }
    out.t = in.t + dt;
    return std::isfinite(check);
}

void check_shape(const FieldState& s, ModelVariant v, const Grid& g) {
    if (s.N() != g.N || static_cast<int>(s.T2.size()) != g.N + 1)
        throw ConfigError("field state does not match the grid");
    if (v == ModelVariant::three_layer && static_cast<int>(s.T3.size()) != g.N + 1)
        throw ConfigError("three-layer variant needs a T3 profile");
}

[[noreturn]] void stability_failure(const ModelCoeffs& c, const Grid& g, ModelVariant v, double t) {
    std::ostringstream os;
    os << "non-finite temperature at t=" << t << " yr; stability requires dt <= "
       << max_stable_dt(c, g, v)
       << (v == ModelVariant::three_layer ? " (1/(l+/dx + 2 kappa_s/dx^2))" : " (dx/l+)");
    throw NumericalError(os.str());
}

}  // namespace

FieldState zero_state(const Grid& grid, ModelVariant variant) {
    FieldState s;
    s.T1.assign(grid.N + 1, 0.0);
    s.T2.assign(grid.N + 1, 0.0);
    if (variant == ModelVariant::three_layer) s.T3.assign(grid.N + 1, 0.0);
    return s;
}

FieldState init_gaussian(const Grid& grid, const GaussianPulse& pulse, ModelVariant variant) {
    grid.validate();
    if (!(pulse.center > 0.0 && pulse.center < 1.0)) throw ConfigError("pulse center must lie in (0, 1)");
    if (!(pulse.width > 0.0)) throw ConfigError("pulse width must be positive");
    const int max_layer = variant == ModelVariant::three_layer ? 3 : 2;
    if (pulse.layer < 1 || pulse.layer > max_layer) throw ConfigError("pulse layer out of range");

    FieldState s = zero_state(grid, variant);
    std::vector<double>& T = pulse.layer == 1 ? s.T1 : pulse.layer == 2 ? s.T2 : s.T3;
    for (int k = 0; k <= grid.N; ++k) {
        const double x = static_cast<double>(k) / grid.N;
        const double z = (x - pulse.center) / pulse.width;
        T[k] = pulse.amplitude * std::exp(-0.5 * z * z);
    }
    T[grid.N] = -T[0];
    return s;
}

FieldState step(const FieldState& state, const ModelCoeffs& coeffs, const Grid& grid,
                ModelVariant variant) {
    grid.validate();
    check_shape(state, variant, grid);
    check_cfl(coeffs, grid, variant);
    FieldState out = state;
    if (!advance(state, out, coeffs, grid, variant)) stability_failure(coeffs, grid, variant, out.t);
    return out;
}

Trajectory simulate(const FieldState& state0, const ModelCoeffs& coeffs, const Grid& grid,
                    ModelVariant variant, const SimulationOptions& opts, FieldState* final_state) {
    grid.validate();
    check_shape(state0, variant, grid);
    check_cfl(coeffs, grid, variant);
    if (!(opts.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    if (opts.sample_every < 1) throw ConfigError("sample_every must be >= 1");
    if (opts.probe < 0 || opts.probe > grid.N) throw ConfigError("probe node out of range");

    const double ratio = opts.t_end / grid.dt;
    long long steps = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
        steps = static_cast<long long>(std::ceil(ratio));

    Trajectory traj;
    const int p = opts.probe;
    const double t0 = state0.t;
    FieldState a = state0, b = state0;
    auto record = [&](const FieldState& s) {
        traj.push(s.t, s.T1[p], s.T2[p]);
        if (opts.observer) opts.observer(s);
    };
    record(a);
    for (long long n = 1; n <= steps; ++n) {
        if (!advance(a, b, coeffs, grid, variant)) stability_failure(coeffs, grid, variant, b.t);
        b.t = t0 + static_cast<double>(n) * grid.dt;
        std::swap(a, b);
        if (n % opts.sample_every == 0) record(a);
    }
    if (final_state) *final_state = std::move(a);
    return traj;
}

Eigen::MatrixXd build_system_matrix(const ModelCoeffs& c, int N, ModelVariant variant,
                                   std::span<const std::size_t> projected_out) {
    if (N < 1) throw ConfigError("system matrix needs N >= 1");
    const bool three = variant == ModelVariant::three_layer;
    const bool ext = variant == ModelVariant::extended;
    const int nv = three ? 3 : 2;
    const int dim = nv * N;
    const double dN = static_cast<double>(N);

    Eigen::MatrixXd adv = Eigen::MatrixXd::Zero(nv, nv);
    Eigen::MatrixXd damp = Eigen::MatrixXd::Zero(nv, nv);
    if (three) {
        adv << c.a1, c.b1, c.c1, c.a2, c.b2, c.c2, 0.0, 0.0, 0.0;
    } else {
        adv << c.a1, c.b1, c.a2, c.b2;
        damp(0, 0) = c.alpha + (ext ? c.beta1 : 0.0);
        damp(0, 1) = ext ? c.beta2 : 0.0;
        damp(1, 1) = c.alpha + (ext ? c.beta3 : 0.0);
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    auto add_block = [&](int row_node, int col_node, const Eigen::MatrixXd& blk) {
        M.block(nv * row_node, nv * col_node, nv, nv) += blk;
    };
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(nv, nv);
    const double kd = three ? c.kappa_s * dN * dN : 0.0;
    for (int n = 0; n < N; ++n) {
        add_block(n, n, -dN * adv - damp - 2.0 * kd * eye);
        if (n + 1 < N) add_block(n, n + 1, dN * adv + kd * eye);
        else add_block(n, 0, -dN * adv - kd * eye);
        if (three) {
            if (n > 0) add_block(n, n - 1, kd * eye);
            else add_block(n, N - 1, -kd * eye);
        }
    }

    if (projected_out.empty()) return M;
    std::vector<char> drop(dim, 0);
    for (std::size_t idx : projected_out) {
        if (idx >= static_cast<std::size_t>(dim)) {
            std::ostringstream os;
            os << "projected index " << idx << " out of range for dimension " << dim;
            throw ConfigError(os.str());
        }
        drop[idx] = 1;
    }
    std::vector<int> keep;
    for (int i = 0; i < dim; ++i)
        if (!drop[i]) keep.push_back(i);
    const int m = static_cast<int>(keep.size());
    Eigen::MatrixXd R(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) R(i, j) = M(keep[i], keep[j]);
    return R;
}

Eigen::VectorXd flatten(const FieldState& s) {
    const int N = s.N();
    const int nv = s.has_third_layer() ? 3 : 2;
    Eigen::VectorXd x(nv * N);
    for (int n = 0; n < N; ++n) {
        x(nv * n) = s.T1[n];
        x(nv * n + 1) = s.T2[n];
        if (nv == 3) x(nv * n + 2) = s.T3[n];
    }
    return x;
}

OverturningSample overturning_at(const FieldState& s, const PhysicalParams& p, int probe) {
    const int N = s.N();
    if (N + 1 < 3) throw ConfigError("overturning diagnostics need at least 3 nodes");
    if (probe < 0 || probe > N) throw ConfigError("probe node out of range");
    const auto& T = s.T1;
    const double prev = probe > 0 ? T[probe - 1] : -T[N - 1];
    const double next = probe < N ? T[probe + 1] : -T[1];
    const double dTdx = (next - prev) * 0.5 * N / p.W;
    const double tw = p.alpha_T * p.g / p.f;
    OverturningSample o;
    o.t = s.t;
    o.dv_dz = tw * dTdx;
    o.dzu = -(p.beta / p.f) * tw * T[probe];
    o.dzu_x = -(p.beta / p.f) * o.dv_dz;
    return o;
}

OverturningDiagnostics overturning_diagnostics(std::span<const FieldState> snapshots,
                                               const PhysicalParams& p, int probe) {
    OverturningDiagnostics d;
    for (const FieldState& s : snapshots) {
        const OverturningSample o = overturning_at(s, p, probe);
        d.t.push_back(o.t);
        d.dv_dz.push_back(o.dv_dz);
        d.dzu.push_back(o.dzu);
        d.dzu_x.push_back(o.dzu_x);
    }
    return d;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    CsvWriter w(path, {"t", "T1", "T2"});
    for (std::size_t i = 0; i < traj.size(); ++i) w.row({traj.t[i], traj.T1[i], traj.T2[i]});
}

void write_field_csv(const FieldState& s, const std::string& path) {
    const bool three = s.has_third_layer();
    CsvWriter w(path, three ? std::vector<std::string>{"x", "T1", "T2", "T3"}
                            : std::vector<std::string>{"x", "T1", "T2"});
    const int N = s.N();
    for (int k = 0; k <= N; ++k) {
        const double x = static_cast<double>(k) / N;
        if (three) w.row({x, s.T1[k], s.T2[k], s.T3[k]});
        else w.row({x, s.T1[k], s.T2[k]});
    }
}

}  // namespace amodelay
