#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amodelay/params.hpp"
#include "amodelay/types.hpp"

namespace amodelay {

enum class ModelVariant { two_layer, three_layer, extended };

std::string to_string(ModelVariant v);
ModelVariant model_variant_from_string(const std::string& s);

/// Uniform grid on [0, 1] with N intervals and time step dt (years).
struct Grid {
    int N = 2000;
    double dt = 0.0005;

    double dx() const { return 1.0 / N; }
    /// Throws ConfigError for N < 4 or dt <= 0.
    void validate() const;
};

/// Largest stable forward-Euler step for the given variant.
double max_stable_dt(const ModelCoeffs& c, const Grid& g, ModelVariant v);

/// Temperature anomaly profiles at nodes x_k = k/N, k = 0..N.
struct FieldState {
    double t = 0.0;
    std::vector<double> T1;
    std::vector<double> T2;
    std::vector<double> T3;  ///< empty unless three-layer

    int N() const { return static_cast<int>(T1.size()) - 1; }
    bool has_third_layer() const { return !T3.empty(); }
};

struct GaussianPulse {
    double center = 0.5;
    double width = 0.05;
    double amplitude = 1.0;
    int layer = 1;
};

FieldState init_gaussian(const Grid& grid, const GaussianPulse& pulse,
                         ModelVariant variant = ModelVariant::two_layer);

/// Zero field on the grid.
FieldState zero_state(const Grid& grid, ModelVariant variant = ModelVariant::two_layer);

/// One forward-Euler upwind step. Throws NumericalError on non-finite values.
FieldState step(const FieldState& state, const ModelCoeffs& coeffs, const Grid& grid,
                ModelVariant variant);

/// Called with each sampled field state (including the initial one).
using FieldObserver = std::function<void(const FieldState&)>;

struct SimulationOptions {
    double t_end = 0.0;
    int sample_every = 1;
    int probe = 0;
    FieldObserver observer;
};

/// Integrates to t_end and returns the (T1, T2) record at the probe node.
/// Also returns the final field through `final_state` when non-null.
Trajectory simulate(const FieldState& state0, const ModelCoeffs& coeffs, const Grid& grid,
                    ModelVariant variant, const SimulationOptions& opts,
                    FieldState* final_state = nullptr);

/// Dense matrix of the semi-discrete system for the flattened state
/// (T1^0, T2^0, ..., T1^{N-1}, T2^{N-1}), or with T3 interleaved for the
/// three-layer variant. Rows and columns in `projected_out` are removed.
Eigen::MatrixXd build_system_matrix(const ModelCoeffs& coeffs, int N, ModelVariant variant,
                                   std::span<const std::size_t> projected_out = {});

/// Flattened state vector matching build_system_matrix ordering.
Eigen::VectorXd flatten(const FieldState& s);

/// Thermal-wind diagnostics at a probe node.
struct OverturningSample {
    double t = 0.0;
    double dv_dz = 0.0;  ///< vertical shear of meridional flow (1/s)
    double dzu = 0.0;    ///< vertical shear of zonal flow (1/s)
    double dzu_x = 0.0;  ///< zonal derivative of dzu (1/(m s))
};

struct OverturningDiagnostics {
    std::vector<double> t;
    std::vector<double> dv_dz;
    std::vector<double> dzu;
    std::vector<double> dzu_x;
};

/// Single snapshot. Uses a centered difference in x for the upper layer,
/// with the antisymmetric wraparound at the west boundary.
OverturningSample overturning_at(const FieldState& s, const PhysicalParams& p, int probe = 0);

OverturningDiagnostics overturning_diagnostics(std::span<const FieldState> snapshots,
                                               const PhysicalParams& p, int probe = 0);

/// CSV writers: `t,T1,T2` and `x,T1,T2[,T3]`.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_field_csv(const FieldState& s, const std::string& path);

}  // namespace amodelay
