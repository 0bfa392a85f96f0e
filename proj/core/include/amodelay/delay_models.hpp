#pragma once

#include <string>

#include "amodelay/history.hpp"
#include "amodelay/mz_reduce.hpp"
#include "amodelay/params.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/types.hpp"

namespace amodelay {

enum class DelayVariant { difference, dde_moc, dde_mz };

std::string to_string(DelayVariant v);
DelayVariant delay_variant_from_string(const std::string& s);

/// Delay model definition. `eps` is ignored by the difference variant.
struct DelaySystem {
    DelayVariant variant = DelayVariant::dde_moc;
    WaveStructure ws;
    double alpha = 0.0;
    double eps = 0.0;
    /// Large-N limit coefficients (used by dde_mz and by error_terms).
    DelayCoefficients mz;

    /// e^{-alpha tau+} C1 and e^{-alpha tau-} C2.
    Mat2 D_plus() const;
    Mat2 D_minus() const;
};

DelaySystem make_delay_system(const ModelCoeffs& c, DelayVariant v, double eps,
                              LaplaceCorrection corr = LaplaceCorrection::published);

struct WarmupOptions {
    int probe = 0;
    /// PDE run length in years; 0 selects tau-.
    double duration = 0.0;
    /// History spacing; 0 selects the grid time step.
    double spacing = 0.0;
    ModelVariant variant = ModelVariant::two_layer;
};

/// Runs the PDE from `ic` and records the probe. The returned buffer ends at
/// t = 0 and reaches back at least `duration` plus two samples.
HistoryBuffer warmup_history(const ModelCoeffs& c, const Grid& grid, const FieldState& ic,
                             const WarmupOptions& opts = {});

/// T(t) = e^{-alpha tau+} C1 T(t - tau+) + e^{-alpha tau-} C2 T(t - tau-).
Vec2 step_difference(const HistoryBuffer& h, const DelaySystem& sys, double t);

struct IntegrateOptions {
    double t_end = 0.0;
    /// Euler step; 0 selects eps/10 (dde variants) or the history spacing.
    double step = 0.0;
};

/// Advances the delay model from the end of `h` to t_end (relative to the
/// buffer end), appending samples to `h` at its own spacing. Returns the
/// samples from the starting time onward. The spacing must not exceed
/// min(tau+, eps)/10 (tau+/10 for the difference variant).
///
/// For dde_mz the O(eps) forcing is evaluated on the leading-order
/// delay-difference continuation of the same history.
Trajectory integrate_dde(HistoryBuffer& h, const DelaySystem& sys, const IntegrateOptions& opts);

/// f_eps(t) evaluated on a history buffer: the instantaneous -(alpha I + B) T
/// part plus the delayed g_eps terms. Derivatives use centered differences
/// with the buffer spacing.
Vec2 error_functional(const HistoryBuffer& h, const DelaySystem& sys, double t);

/// The O(eps) contribution eps * f_eps(t) with eps = 1/N.
Vec2 error_terms(const HistoryBuffer& h, const DelaySystem& sys, double t, int N);

/// Characteristic matrix of the delay model at lambda (2x2, complex).
/// For the difference variant eps is taken as zero.
CMat2 characteristic_matrix(const DelaySystem& sys, Complex lambda);
/// d/dlambda of characteristic_matrix.
CMat2 characteristic_matrix_derivative(const DelaySystem& sys, Complex lambda);

}  // namespace amodelay
