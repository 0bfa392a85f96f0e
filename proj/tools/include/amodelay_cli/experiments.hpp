#pragma once

// Reusable run protocols shared by the command-line tool and the acceptance
// suite.

#include <array>
#include <span>
#include <vector>

#include "amodelay/delay_models.hpp"
#include "amodelay/params.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/spectral.hpp"

namespace amodelay::cli {

// ---- basin-width sensitivity ----

inline constexpr std::array<double, 7> kSensitivityWidthsKm = {6540, 6240, 5760, 5100, 4260, 3360, 2280};

struct SensitivityRow {
    double W_km = 0;
    double two_tau_minus = 0;
    double two_thirds_tau_minus = 0;
    double two_tau_plus = 0;
};

std::vector<SensitivityRow> sensitivity_table(const PhysicalParams& base, std::span<const double> widths_km);

// ---- delay model runs ----

struct DelayRunSetup {
    /// Warmup grid.
    int N = 400;
    double dt = 0.0025;
    /// 0 selects 1/N.
    double eps = 0.0;
    DelayVariant variant = DelayVariant::dde_moc;
    LaplaceCorrection correction = LaplaceCorrection::published;
    double t_end = 200.0;
    /// Keep every `stride`-th sample in the returned trajectory.
    int stride = 10;
    bool zero_ic = false;
};

struct DelayRun {
    DelaySystem sys;
    /// History plus the integrated samples.
    HistoryBuffer buffer;
    /// Samples from t = 0 onward, thinned by the stride.
    Trajectory traj;
    double eps = 0;
};

/// PDE warmup for tau- years from the Gaussian pulse (or zero), then the
/// delay model at history spacing eps/10 (tau+/1000 for the difference
/// variant).
DelayRun run_delay_model(const ModelCoeffs& c, const DelayRunSetup& setup);

// ---- error terms ----

struct ErrorTermStudy {
    std::vector<int> Ns;
    /// max |eps f_eps| over the window, for each N, on the reference run.
    std::vector<double> max_abs;
    /// max_abs[i] / max_abs[i + 1].
    std::vector<double> ratios;
    /// Dominant frequency of the f_eps series (1/yr).
    double peak_frequency = 0;
    double df = 0;
    /// f_eps on the window (t, f1, f2), unscaled.
    Trajectory series;

    /// Same statistics with f_eps evaluated on a separate run at eps = 1/N
    /// for each N (filled when requested).
    std::vector<double> self_max_abs;
    std::vector<double> self_ratios;
};

/// f_eps is evaluated on one reference delay-model trajectory (eps = 1/400)
/// over the window [tau-, t_end] and scaled by 1/N.
ErrorTermStudy error_term_study(const ModelCoeffs& c, std::span<const int> Ns, bool self_consistent,
                                double t_end = 200.0);

// ---- boundary-condition error ----

struct BcErrorStudy {
    std::vector<int> Ns;
    std::vector<Complex> lambda_disc, lambda_moc, lambda_mz;
    std::vector<double> disc, moc, mz;
    double slope_disc = 0, slope_moc = 0, slope_mz = 0;
};

/// Lowest mode of one branch at eps = 1/N for each N.
BcErrorStudy bc_error_study(const ModelCoeffs& c, std::span<const int> Ns, Branch b = Branch::minus, int k = 0);

/// Least-squares slope of log(err) against log(N).
double loglog_slope(std::span<const int> Ns, std::span<const double> err);

bool strictly_decreasing(std::span<const double> v);

// ---- background overturning ----

struct DampingStudy {
    /// Power near 2 tau+ relative to power near 2 tau-, surface layer.
    double base_ratio = 0;
    double extended_ratio = 0;
    ExpansionCoeffs expansion;
};

DampingStudy extended_damping_study(const ModelCoeffs& c, double t_end = 200.0);

/// Largest PSD ordinate within `half_width` bins of frequency f.
double band_power(const SpectrumResult& s, double f, int half_width = 3);

// ---- overturning phases ----

struct PhaseStudy {
    double period = 0;
    /// Lag of d v / d z and of the zonal shear behind T1 (years).
    double lag_dv_dz = 0;
    double lag_dzu = 0;
};

PhaseStudy overturning_phase_study(const PhysicalParams& p, const ModelCoeffs& c, double t_end = 200.0);

}  // namespace amodelay::cli
