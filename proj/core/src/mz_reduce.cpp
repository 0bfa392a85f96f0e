#include "amodelay/mz_reduce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "amodelay/csv.hpp"
#include "amodelay/errors.hpp"
#include "amodelay/pde_sim.hpp"

namespace amodelay {

namespace {

void require_N(int N, int min_N) {
    if (N < min_N) {
        std::ostringstream os;
        os << "N must be >= " << min_N << " (got " << N << ")";
        throw ConfigError(os.str());
    }
}

// Poisson weight mu^k e^{-mu} / k!.
double poisson(int k, double mu) {
    if (mu <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

}  // namespace

Eigen::VectorXd OrthogonalEigen::generalized_eigenvector(Branch b, int i) const {
    if (i < 1 || i > N - 1) throw ConfigError("chain index out of range");
    const double l = b == Branch::plus ? l_plus : l_minus;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * (N - 1));
    v.segment<2>(2 * (i - 1)) = std::pow(1.0 / (N * l), i - 1) * (b == Branch::plus ? v_plus : v_minus);
    return v;
}

OrthogonalEigen orthogonal_eigen(const ModelCoeffs& c, int N) {
    require_N(N, 4);
    const WaveStructure ws = derive_wave_structure(c);
    OrthogonalEigen e;
    e.N = N;
    e.alpha = c.alpha;
    e.l_plus = ws.l_plus;
    e.l_minus = ws.l_minus;
    e.w_plus = ws.w_plus;
    e.w_minus = ws.w_minus;
    e.lambda_plus = -c.alpha - ws.l_plus * N;
    e.lambda_minus = -c.alpha - ws.l_minus * N;
    e.multiplicity = N - 1;
    e.v_plus = ws.v_plus;
    e.v_minus = ws.v_minus;
    return e;
}

std::vector<std::size_t> resolved_indices(Resolved r) {
    switch (r) {
        case Resolved::both: return {0, 1};
        case Resolved::T1_only: return {0};
        case Resolved::T2_only: return {1};
    }
    return {};
}

EigenSet orthogonal_spectrum(const ModelCoeffs& c, int N, Resolved r) {
    if (r == Resolved::both) {
        const OrthogonalEigen e = orthogonal_eigen(c, N);
        EigenSet s;
        s.label = "proj_both";
        s.values.assign(N - 1, Complex(e.lambda_plus, 0.0));
        s.values.insert(s.values.end(), N - 1, Complex(e.lambda_minus, 0.0));
        return s;
    }
    require_N(N, 4);
    const auto idx = resolved_indices(r);
    const Eigen::MatrixXd MQ = build_system_matrix(c, N, ModelVariant::two_layer, idx);
    DenseEigenOptions opts;
    opts.residuals = false;
    return dense_eigensolver(MQ, opts, r == Resolved::T1_only ? "proj_T1" : "proj_T2");
}

OrthogonalSolution::OrthogonalSolution(const ModelCoeffs& c, int N,
                                       const Eigen::VectorXd& unresolved_ic)
    : N_(N), alpha_(c.alpha), eig_(orthogonal_eigen(c, N)) {
    if (unresolved_ic.size() != 2 * (N - 1))
        throw ConfigError("unresolved initial state must have length 2(N-1)");
    Mat2 E;
    E.col(0) = eig_.v_plus;
    E.col(1) = eig_.v_minus;
    const Mat2 Einv = E.inverse();
    q_plus_.resize(N - 1);
    q_minus_.resize(N - 1);
    for (int i = 0; i < N - 1; ++i) {
        const Vec2 q = Einv * unresolved_ic.segment<2>(2 * i);
        q_plus_[i] = q(0);
        q_minus_[i] = q(1);
    }
}

double OrthogonalSolution::modal(Branch b, int i) const {
    if (i < 1 || i > N_ - 1) throw ConfigError("chain index out of range");
    return b == Branch::plus ? q_plus_[i - 1] : q_minus_[i - 1];
}

double OrthogonalSolution::constant(Branch b, int i) const {
    const double l = b == Branch::plus ? eig_.l_plus : eig_.l_minus;
    return std::pow(l * N_, i - 1) * modal(b, i);
}

double OrthogonalSolution::block_sum(Branch b, int j, double t) const {
    const std::vector<double>& q = b == Branch::plus ? q_plus_ : q_minus_;
    const double mu = (b == Branch::plus ? eig_.l_plus : eig_.l_minus) * N_ * t;
    double s = 0.0;
    for (int i = j; i <= N_ - 1; ++i) {
        const double qi = q[i - 1];
        if (qi != 0.0) s += qi * poisson(i - j, mu);
    }
    return s * std::exp(-alpha_ * t);
}

Eigen::VectorXd OrthogonalSolution::evaluate(double t) const {
    if (!(t >= 0.0)) throw ConfigError("orthogonal dynamics evaluated at negative time");
    Eigen::VectorXd out(2 * (N_ - 1));
    for (int j = 1; j <= N_ - 1; ++j)
        out.segment<2>(2 * (j - 1)) =
            block_sum(Branch::plus, j, t) * eig_.v_plus + block_sum(Branch::minus, j, t) * eig_.v_minus;
    return out;
}

Vec2 OrthogonalSolution::first_block(double t) const {
    if (!(t >= 0.0)) throw ConfigError("orthogonal dynamics evaluated at negative time");
    return block_sum(Branch::plus, 1, t) * eig_.v_plus + block_sum(Branch::minus, 1, t) * eig_.v_minus;
}

Vec2 noise_terms(const ModelCoeffs& c, int N, const Eigen::VectorXd& unresolved_ic, double t) {
    if (!(t >= 0.0)) throw ConfigError("noise terms need t >= 0");
    const OrthogonalSolution sol(c, N, unresolved_ic);
    return static_cast<double>(N) * c.A() * sol.first_block(t);
}

double kernel_shape(double t, double mu, double alpha, int N) {
    require_N(N, 2);
    if (t < 0.0) throw ConfigError("kernel shape needs t >= 0");
    if (t == 0.0) return N == 2 ? static_cast<double>(N) * N : 0.0;
    const double lg = 2.0 * std::log(static_cast<double>(N)) + (N - 2) * std::log(t) -
                      std::lgamma(N - 1.0) - alpha * t + (N - 2) * std::log(mu * N) - mu * N * t;
    return std::exp(lg);
}

Mat2 memory_kernel(const ModelCoeffs& c, int N, double s) {
    require_N(N, 2);
    if (!(s >= 0.0)) throw ConfigError("memory kernel needs s >= 0");
    const WaveStructure ws = derive_wave_structure(c);
    return kernel_shape(s, ws.l_plus, c.alpha, N) * ws.M_plus +
           kernel_shape(s, ws.l_minus, c.alpha, N) * ws.M_minus;
}

Vec2 memory_integrand(const ModelCoeffs& c, int N, double T1_0, double T2_0, double s) {
    return memory_kernel(c, N, s) * Vec2(T1_0, T2_0);
}

KernelOracle::KernelOracle(const ModelCoeffs& c, int N, std::vector<std::size_t> resolved) {
    require_N(N, 2);
    if (N > 64) throw ConfigError("kernel oracle is limited to N <= 64");
    M_ = build_system_matrix(c, N, ModelVariant::two_layer);
    const int dim = static_cast<int>(M_.rows());
    std::vector<char> is_res(dim, 0);
    for (std::size_t r : resolved) {
        if (r >= static_cast<std::size_t>(dim)) throw ConfigError("resolved index out of range");
        is_res[r] = 1;
    }
    std::vector<int> y, z;
    for (int i = 0; i < dim; ++i) (is_res[i] ? y : z).push_back(i);
    auto sub = [&](const std::vector<int>& r, const std::vector<int>& cidx) {
        Eigen::MatrixXd S(r.size(), cidx.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < cidx.size(); ++j) S(i, j) = M_(r[i], cidx[j]);
        return S;
    };
    Myy_ = sub(y, y);
    Myz_ = sub(y, z);
    Mzy_ = sub(z, y);
    Mzz_ = sub(z, z);
}

Eigen::MatrixXd KernelOracle::kernel(double s) const {
    const Eigen::MatrixXd E = (s * Mzz_).exp();
    return Myz_ * E * Mzy_;
}

Eigen::MatrixXd KernelOracle::kernel_at_zero_direct() const { return Myz_ * Mzy_; }

Eigen::VectorXd KernelOracle::noise(double t, const Eigen::VectorXd& z0) const {
    const Eigen::MatrixXd E = (t * Mzz_).exp();
    return Myz_ * (E * z0);
}

Eigen::VectorXd KernelOracle::full_solution(double t, const Eigen::VectorXd& x0) const {
    const Eigen::MatrixXd E = (t * M_).exp();
    return E * x0;
}

namespace {

std::vector<Vec2> langevin_run(const ModelCoeffs& c, int N, const Eigen::VectorXd& full_ic,
                               double h, long long steps) {
    const Mat2 R = -static_cast<double>(N) * c.A() - c.alpha * Mat2::Identity();
    const Eigen::VectorXd unresolved = full_ic.tail(2 * (N - 1));
    const bool has_noise = unresolved.cwiseAbs().maxCoeff() > 0.0;
    const OrthogonalSolution sol(c, N, unresolved);
    const Mat2 NA = static_cast<double>(N) * c.A();

    std::vector<Mat2> K(steps + 1);
    for (long long j = 0; j <= steps; ++j) K[j] = memory_kernel(c, N, static_cast<double>(j) * h);
    auto F = [&](long long n) -> Vec2 {
        if (!has_noise) return Vec2::Zero();
        return NA * sol.first_block(static_cast<double>(n) * h);
    };

    std::vector<Vec2> y(steps + 1);
    y[0] = full_ic.head<2>();
    const Mat2 lhs = Mat2::Identity() - 0.5 * h * R - 0.25 * h * h * K[0];
    const Eigen::PartialPivLU<Mat2> lu(lhs);
    Vec2 I_n = Vec2::Zero();
    Vec2 F_n = F(0);
    for (long long n = 0; n < steps; ++n) {
        Vec2 S = 0.5 * h * K[n + 1] * y[0];
        for (long long j = 1; j <= n; ++j) S += h * K[j] * y[n + 1 - j];
        const Vec2 F_next = F(n + 1);
        const Vec2 rhs = y[n] + 0.5 * h * (R * y[n] + F_n + I_n + F_next + S);
        y[n + 1] = lu.solve(rhs);
        I_n = 0.5 * h * K[0] * y[n + 1] + S;
        F_n = F_next;
        if (!y[n + 1].allFinite()) throw NumericalError("Langevin quadrature became unstable");
    }
    return y;
}

}  // namespace

Trajectory langevin_simulate(const ModelCoeffs& c, int N, const Eigen::VectorXd& full_ic,
                             const LangevinOptions& opts) {
    require_N(N, 2);
    if (full_ic.size() != 2 * N) throw ConfigError("full initial state must have length 2N");
    if (!(opts.dt > 0.0)) throw ConfigError("Langevin step must be positive");
    if (!(opts.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    const long long steps = std::llround(opts.t_end / opts.dt);
    const double h = steps > 0 ? opts.t_end / static_cast<double>(steps) : opts.dt;

    std::vector<Vec2> y = langevin_run(c, N, full_ic, h, steps);
    if (opts.richardson && steps > 0) {
        const std::vector<Vec2> fine = langevin_run(c, N, full_ic, 0.5 * h, 2 * steps);
        for (long long n = 0; n <= steps; ++n) y[n] = (4.0 * fine[2 * n] - y[n]) / 3.0;
    }
    Trajectory traj;
    for (long long n = 0; n <= steps; ++n) traj.push(static_cast<double>(n) * h, y[n]);
    return traj;
}

std::string to_string(LaplaceCorrection c) {
    return c == LaplaceCorrection::published ? "published" : "exact_moments";
}

DelayCoefficients laplace_limit(const ModelCoeffs& c, LaplaceCorrection corr) {
    const WaveStructure ws = derive_wave_structure(c);
    const ExpansionCoeffs ex = expansion_coeffs(c);
    DelayCoefficients d;
    d.correction = corr;
    d.l_plus = ws.l_plus;
    d.l_minus = ws.l_minus;
    d.tau_plus = ws.tau_plus;
    d.tau_minus = ws.tau_minus;
    d.alpha_plus = c.alpha + ex.l1_plus;
    d.alpha_minus = c.alpha + ex.l1_minus;
    d.G_plus = ws.tau_plus * std::exp(-d.alpha_plus * ws.tau_plus) * ws.M_plus;
    d.G_minus = ws.tau_minus * std::exp(-d.alpha_minus * ws.tau_minus) * ws.M_minus;
    d.markov = -c.A();
    d.markov_eps = -(c.alpha * Mat2::Identity() + c.B());
    const double k = corr == LaplaceCorrection::published ? 7.0 / 6.0 : 1.0;
    auto g = [&](double l, double a, double tau) {
        const double h = 0.5 * tau * tau;
        return std::array<double, 3>{h * ((l + a) * (l + a) - k * l * l), h * 2.0 * (l + a), h};
    };
    d.g_plus = g(ws.l_plus, d.alpha_plus, ws.tau_plus);
    d.g_minus = g(ws.l_minus, d.alpha_minus, ws.tau_minus);
    return d;
}

void write_kernel_csv(const ModelCoeffs& c, int N, const std::vector<double>& times,
                      const std::string& path) {
    CsvWriter w(path, {"t", "K11", "K12", "K21", "K22"});
    for (double t : times) {
        const Mat2 K = memory_kernel(c, N, t);
        w.row({t, K(0, 0), K(0, 1), K(1, 0), K(1, 1)});
    }
}

void write_noise_csv(const ModelCoeffs& c, int N, const Eigen::VectorXd& unresolved_ic,
                     const std::vector<double>& times, const std::string& path) {
    const OrthogonalSolution sol(c, N, unresolved_ic);
    const Mat2 NA = static_cast<double>(N) * c.A();
    CsvWriter w(path, {"t", "F1", "F2"});
    for (double t : times) {
        const Vec2 F = NA * sol.first_block(t);
        w.row({t, F(0), F(1)});
    }
}

}  // namespace amodelay
