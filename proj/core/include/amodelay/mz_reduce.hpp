#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amodelay/dense_eigen.hpp"
#include "amodelay/params.hpp"
#include "amodelay/types.hpp"

namespace amodelay {

enum class Branch { plus, minus };
enum class Resolved { both, T1_only, T2_only };

/// Closed-form eigenstructure of the orthogonal dynamics when both boundary
/// temperatures are resolved. Two eigenvalues, each with one Jordan chain of
/// length N-1.
struct OrthogonalEigen {
    int N = 0;
    double alpha = 0;
    double l_plus = 0, l_minus = 0;
    double w_plus = 0, w_minus = 0;
    double lambda_plus = 0, lambda_minus = 0;
    int multiplicity = 0;
    /// Eigenvectors of A; (w, 1) whenever a2 != 0.
    Vec2 v_plus = Vec2::Zero(), v_minus = Vec2::Zero();

    /// Chain vector i (1-based, i <= N-1) of length 2(N-1):
    /// (dx/l)^{i-1} (w, 1) placed at unresolved block i.
    Eigen::VectorXd generalized_eigenvector(Branch b, int i) const;
};

OrthogonalEigen orthogonal_eigen(const ModelCoeffs& c, int N);

/// Spectrum of M_Q for the given projection. `both` returns the closed-form
/// values with multiplicity; single-variable projections use the dense solver.
EigenSet orthogonal_spectrum(const ModelCoeffs& c, int N, Resolved r);

/// Indices removed from the flattened state for a projection.
std::vector<std::size_t> resolved_indices(Resolved r);

/// Solution of the orthogonal dynamics for a given unresolved initial state
/// (T1^1, T2^1, ..., T1^{N-1}, T2^{N-1}). Internally stores the modal
/// coordinates q^i = c^i (dx/l)^{i-1} so that evaluation stays finite.
class OrthogonalSolution {
public:
    OrthogonalSolution(const ModelCoeffs& c, int N, const Eigen::VectorXd& unresolved_ic);

    /// The constant c±^i of the expansion (may overflow to inf for large N).
    double constant(Branch b, int i) const;
    /// Modal coordinate q±^i.
    double modal(Branch b, int i) const;

    /// T_Q(t) for all unresolved blocks.
    Eigen::VectorXd evaluate(double t) const;
    /// First unresolved block (T1^1, T2^1) at time t.
    Vec2 first_block(double t) const;

    int N() const { return N_; }

private:
    double block_sum(Branch b, int j, double t) const;

    int N_;
    double alpha_;
    OrthogonalEigen eig_;
    std::vector<double> q_plus_;
    std::vector<double> q_minus_;
};

/// Noise terms (F_T1, F_T2) at time t >= 0.
Vec2 noise_terms(const ModelCoeffs& c, int N, const Eigen::VectorXd& unresolved_ic, double t);

/// Memory kernel matrix K(s) acting on (T1^0, T2^0), closed form.
Mat2 memory_kernel(const ModelCoeffs& c, int N, double s);

/// Memory integrand (K_T1, K_T2) for resolved values (T1_0, T2_0) at lag s.
Vec2 memory_integrand(const ModelCoeffs& c, int N, double T1_0, double T2_0, double s);

/// N^2 t^{N-2}/(N-2)! e^{-alpha t} (mu N)^{N-2} e^{-mu N t}, in log space.
double kernel_shape(double t, double mu, double alpha, int N);

/// Numeric MZ objects of the discretized two-layer system from dense matrix
/// exponentials (N <= 64).
class KernelOracle {
public:
    KernelOracle(const ModelCoeffs& c, int N, std::vector<std::size_t> resolved = {0, 1});

    /// K(s) = M_yz exp(s M_zz) M_zy.
    Eigen::MatrixXd kernel(double s) const;
    /// P M Q M restricted to the resolved directions, without an exponential.
    Eigen::MatrixXd kernel_at_zero_direct() const;
    /// F(t) = M_yz exp(t M_zz) z0.
    Eigen::VectorXd noise(double t, const Eigen::VectorXd& z0) const;
    /// exp(t M) x0 for the full system.
    Eigen::VectorXd full_solution(double t, const Eigen::VectorXd& x0) const;

    const Eigen::MatrixXd& M() const { return M_; }
    const Eigen::MatrixXd& M_yy() const { return Myy_; }

private:
    Eigen::MatrixXd M_, Myy_, Myz_, Mzy_, Mzz_;
};

struct LangevinOptions {
    double t_end = 2.0;
    double dt = 1.0e-3;
    /// Combine runs at dt and dt/2 to cancel the leading error term.
    bool richardson = true;
};

/// Integrates the generalized Langevin equation for the boundary node of the
/// discretized two-layer model: Markovian part, noise from the unresolved
/// initial state, and the memory convolution by the trapezoidal rule.
/// `full_ic` is the flattened state (length 2N).
Trajectory langevin_simulate(const ModelCoeffs& c, int N, const Eigen::VectorXd& full_ic,
                             const LangevinOptions& opts = {});

enum class LaplaceCorrection {
    published,      ///< T coefficient (l+a)^2 - 7/6 l^2
    exact_moments,  ///< T coefficient (l+a)^2 - l^2 from the Gamma-kernel moments
};

std::string to_string(LaplaceCorrection c);

/// Coefficients of the delay model obtained from the kernel in the limit of
/// large N, with the first-order correction generators.
struct DelayCoefficients {
    double tau_plus = 0, tau_minus = 0;
    double l_plus = 0, l_minus = 0;
    /// Effective damping per branch (alpha plus the extended-model l1 term).
    double alpha_plus = 0, alpha_minus = 0;
    /// tau M e^{-alpha_eff tau}: delayed coupling matrices.
    Mat2 G_plus = Mat2::Zero(), G_minus = Mat2::Zero();
    /// -A: instantaneous term at leading order.
    Mat2 markov = Mat2::Zero();
    /// -(alpha I + B): instantaneous part of f_eps.
    Mat2 markov_eps = Mat2::Zero();
    /// Coefficients of (T, T', T'') at t - tau in g_eps.
    std::array<double, 3> g_plus{}, g_minus{};
    LaplaceCorrection correction = LaplaceCorrection::published;
};

DelayCoefficients laplace_limit(const ModelCoeffs& c,
                                LaplaceCorrection corr = LaplaceCorrection::published);

/// CSV traces `t,K11,K12,K21,K22` and `t,F1,F2`.
void write_kernel_csv(const ModelCoeffs& c, int N, const std::vector<double>& times,
                      const std::string& path);
void write_noise_csv(const ModelCoeffs& c, int N, const Eigen::VectorXd& unresolved_ic,
                     const std::vector<double>& times, const std::string& path);

}  // namespace amodelay
