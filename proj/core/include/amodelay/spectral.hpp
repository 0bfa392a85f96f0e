#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "amodelay/delay_models.hpp"
#include "amodelay/dense_eigen.hpp"
#include "amodelay/mz_reduce.hpp"
#include "amodelay/params.hpp"
#include "amodelay/types.hpp"

namespace amodelay {

// ---- power spectra ----

enum class Window { none, hann };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

struct Peak {
    double frequency = 0;  ///< 1/yr
    double power = 0;
    std::size_t bin = 0;

    double period() const { return 1.0 / frequency; }
};

struct SpectrumResult {
    std::vector<double> freqs;
    std::vector<double> psd;
    /// Local maxima above 5% of the global maximum, strongest first.
    std::vector<Peak> peaks;
    double df = 0;
    double dt = 0;
    std::size_t n_samples = 0;
    std::size_t n_fft = 0;
    Window window = Window::hann;
    /// Mean square of the demeaned, windowed signal; sum(psd) * df matches it.
    double windowed_variance = 0;
};

/// One-sided periodogram of a uniformly sampled series. The mean is removed,
/// the window applied and the result zero-padded to the next power of two.
SpectrumResult psd(std::span<const double> x, double dt, Window window = Window::hann);

/// Same for one component (1 or 2) of a trajectory. Throws ConfigError on
/// non-uniform time stamps.
SpectrumResult psd(const Trajectory& traj, int layer = 1, Window window = Window::hann);

/// Peak closest in frequency to `f`; nullptr when there are no peaks.
const Peak* nearest_peak(const SpectrumResult& s, double f);

/// Phase by which `y` lags `x` at frequency f, from single-frequency DFT
/// coefficients, expressed in years and wrapped to (-P/2, P/2].
double phase_lag(std::span<const double> x, std::span<const double> y, double dt, double f);

// ---- eigenvalues ----

/// Closed-form spectrum of the upwind system matrix (two-layer, no betas):
/// lambda = -alpha + l N (rho - 1) with rho^N = -1, both branches.
/// Eigenvectors are rho^n times the eigenvector of A when `with_vectors`.
EigenSet discrete_eigen_closed_form(const ModelCoeffs& c, int N, bool with_vectors = false);

/// Mode k of the discrete spectrum for one branch.
Complex discrete_eigenvalue(const ModelCoeffs& c, int N, Branch b, int k);

struct PdeEigenfunction {
    Complex lambda;
    Branch branch = Branch::plus;
    int k = 0;
    /// V(x) = V0 e^{i pi (2k+1) x}, with V0 scaled so that V1(0) = 1.
    CVec2 V0 = CVec2::Zero();

    CVec2 operator()(double x) const;
};

/// lambda = -alpha + i pi (2k+1) l± for k = 0..k_max, plus branch first.
EigenSet exact_pde_eigen(const WaveStructure& ws, double alpha, int k_max,
                         std::vector<PdeEigenfunction>* functions = nullptr);

// ---- delay model roots ----

struct CharRoot {
    Complex lambda;
    double residual = 0;  ///< |det M(lambda)|
    int iterations = 0;
};

struct CharRootsResult {
    std::vector<CharRoot> roots;
    /// Indices of guesses that did not converge.
    std::vector<std::size_t> failed;
};

struct CharRootsOptions {
    int max_iterations = 100;
    double tolerance = 1e-13;
    double dedupe = 1e-8;
};

/// Newton iteration on det of the characteristic matrix from each guess.
CharRootsResult char_roots(const DelaySystem& sys, std::span<const Complex> guesses,
                           const CharRootsOptions& opts = {});

double char_residual(const DelaySystem& sys, Complex lambda);

// ---- asymptotic spectrum ----

struct AsymptoticPoint {
    double phi = 0;
    double omega = 0;
    /// Number of roots of the quadratic in z (0, 1 or 2).
    int n_roots = 0;
    std::array<Complex, 2> z{};
    std::array<double, 2> re_lambda{};
    double im_lambda = 0;  ///< omega / eps
    /// Determinant identically zero in z.
    bool degenerate = false;
};

/// Solves det[-i omega I - I + C1 e^{i phi} + C2 z] = 0 for z over the grid,
/// and maps each root to Re lambda = -alpha - log|z| / tau-.
std::vector<AsymptoticPoint> asymptotic_spectrum(const WaveStructure& ws, double alpha, double eps,
                                                 std::span<const double> omegas,
                                                 std::span<const double> phis);

/// Coefficients (c0, c1, c2) of det(X + z C2) = c0 + c1 z + c2 z^2.
std::array<Complex, 3> asymptotic_quadratic(const WaveStructure& ws, double omega, double phi);

// ---- boundary-condition error ----

struct ExactPdeSource {
    Branch branch = Branch::plus;
};
struct DiscretePdeSource {
    int N = 0;
    Branch branch = Branch::plus;
};
struct DelayModelSource {
    DelaySystem sys;
};
using BcSource = std::variant<ExactPdeSource, DiscretePdeSource, DelayModelSource>;

std::string source_name(const BcSource& s);

struct BcErrorResult {
    double error = 0;
    double residual = 0;
    CVec2 V0 = CVec2::Zero();
    CVec2 V1 = CVec2::Zero();  ///< V at x = 1
};

/// |V1(0) + V1(1)| for the eigenfunction reconstructed from the
/// characteristic ansatz at lambda, normalized so that V1(0) = 1. Throws
/// ConfigError when lambda is not a root of the source (residual > 1e-8).
BcErrorResult eigenfunction_bc_error(Complex lambda, const WaveStructure& ws, double alpha,
                                     const BcSource& source);

/// V(x) = sum± P± e^{(lambda + alpha) tau± x} V(0).
CVec2 reconstruct_eigenfunction(const WaveStructure& ws, double alpha, Complex lambda,
                                const CVec2& V0, double x);

// ---- CSV ----

/// `re,im,label`
void write_eigen_csv(const EigenSet& e, const std::string& path);
/// `freq,psd`
void write_spectrum_csv(const SpectrumResult& s, const std::string& path);
/// `phi,omega,re_lambda,branch`
void write_asymptotic_csv(const std::vector<AsymptoticPoint>& pts, const std::string& path);

}  // namespace amodelay
