#pragma once

#include "amodelay/types.hpp"

namespace amodelay {

/// Physical parameters in SI units. Defaults are the reference AMO values.
struct PhysicalParams {
    double h1 = 600.0;       ///< upper layer thickness (m)
    double h2 = 600.0;       ///< middle layer thickness (m)
    double h3 = 3300.0;      ///< deep layer thickness (m)
    double H = 4500.0;       ///< total depth (m)
    double W = 4.0e6;        ///< zonal basin size (m)
    double L = 6.5e6;        ///< meridional basin size (m)
    double Y = 3.1536e7;     ///< time scale, one year (s)
    double kappa = 2.0e3;    ///< horizontal diffusivity (m^2/s)
    double g = 9.8;          ///< gravity (m/s^2)
    double f = 1.0e-4;       ///< Coriolis parameter (1/s)
    double beta = 1.5e-11;   ///< beta effect (1/(m s))
    double alpha_T = 2.0e-4; ///< thermal expansion (1/K)
    double alpha_S = 7.0e-4; ///< haline contraction (1/psu)
    double dT = -20.0;       ///< meridional temperature difference (K)
    double dS = -1.5;        ///< meridional salinity difference (psu)
    double u_bar = 1.0e-2;   ///< zonal background velocity (m/s)
    double C = 1.0;          ///< vertical stratification control parameter
    double v_bar = 0.0;      ///< meridional background velocity (m/s)
    double w_bar = 0.0;      ///< vertical background velocity (m/s)

    /// Throws ConfigError when a physical invariant is violated.
    void validate() const;

    bool operator==(const PhysicalParams&) const = default;
};

/// Nondimensional PDE coefficients (basin widths, years).
struct ModelCoeffs {
    double a1 = 0, b1 = 0, c1 = 0;
    double a2 = 0, b2 = 0, c2 = 0;
    double kappa_s = 0;
    double alpha = 0;
    double beta1 = 0, beta2 = 0, beta3 = 0;

    /// Advection matrix [[a1, b1], [a2, b2]].
    Mat2 A() const;
    /// Background-overturning matrix [[beta1, beta2], [0, beta3]].
    Mat2 B() const;
    /// (a1 + b2)^2 - 4 a1 b2 + 4 a2 b1.
    double discriminant() const;

    bool operator==(const ModelCoeffs&) const = default;
};

ModelCoeffs derive_coeffs(const PhysicalParams& p, double alpha = 0.0);

/// Characteristic structure of the two-layer advection matrix.
///
/// T_P follows the published column order: its first column is the
/// eigenvector of A for l_minus, the second the one for l_plus. C1 is the
/// negated projector onto the l_plus eigenvector and pairs with tau_plus.
struct WaveStructure {
    double l_plus = 0, l_minus = 0;
    double tau_plus = 0, tau_minus = 0;
    double w_plus = 0, w_minus = 0;
    Mat2 T_P = Mat2::Zero();
    Mat2 T_P_inv = Mat2::Zero();
    Mat2 C1 = Mat2::Zero();
    Mat2 C2 = Mat2::Zero();
    /// Rows (A_{1+}, B_{1+}) and (A_{2+}, B_{2+}).
    Mat2 M_plus = Mat2::Zero();
    Mat2 M_minus = Mat2::Zero();
    /// Eigenvectors of A, scaled to unit second component when possible.
    Vec2 v_plus = Vec2::Zero();
    Vec2 v_minus = Vec2::Zero();

    /// Spectral projector P+ = -C1 (onto v_plus along v_minus).
    Mat2 P_plus() const { return -C1; }
    Mat2 P_minus() const { return -C2; }
};

/// Throws DegenerateCharacteristics when the discriminant is not positive.
WaveStructure derive_wave_structure(const ModelCoeffs& c);

/// Characteristic speeds of [[a1,b1],[a2,b2]] from the quadratic formula.
struct Speeds {
    double l_plus;
    double l_minus;
};
Speeds characteristic_speeds(double a1, double b1, double a2, double b2);

/// Delay coupling matrices in the closed form of the method of characteristics
/// (requires a2 != 0).
struct CouplingPair {
    Mat2 first;
    Mat2 second;
};
CouplingPair moc_coupling_closed_form(const ModelCoeffs& c);

/// MZ constants (A_{i±}, B_{i±}) as M_plus, M_minus (requires a2 != 0).
CouplingPair mz_coupling_constants(const ModelCoeffs& c);

/// Zeroth and first order speeds for the extended model in powers of dx.
struct ExpansionCoeffs {
    double l0_plus = 0, l0_minus = 0;
    double l1_plus = 0, l1_minus = 0;
};

ExpansionCoeffs expansion_coeffs(const ModelCoeffs& c);

/// Exact eigenvalues of A + dx B, i.e. l±(dx), for the extended model.
Speeds extended_speeds(const ModelCoeffs& c, double dx);

PhysicalParams scale_basin_width(const PhysicalParams& p, double W_new);

/// Betas used for the published background-overturning runs.
ModelCoeffs with_betas(ModelCoeffs c, double beta1, double beta2, double beta3);
inline constexpr double kFigureBeta13 = 1.156e-3;
inline constexpr double kFigureBeta2 = 7.148e-3;

}  // namespace amodelay
