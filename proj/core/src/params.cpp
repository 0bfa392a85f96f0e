#include "amodelay/params.hpp"

#include <cmath>
#include <sstream>

#include "amodelay/errors.hpp"

namespace amodelay {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be strictly positive (got " << v << ")";
        throw ConfigError(os.str());
    }
}

// Eigenvector of [[a1,b1],[a2,b2]] for eigenvalue l, second component 1 when
// the coupling allows it.
Vec2 eigenvector(const Mat2& A, double l) {
    const Vec2 from_row2(l - A(1, 1), A(1, 0));
    const Vec2 from_row1(A(0, 1), l - A(0, 0));
    Vec2 v = from_row2.norm() >= from_row1.norm() ? from_row2 : from_row1;
    if (v.norm() == 0.0) v = Vec2(1.0, 0.0);
    if (std::abs(v(1)) > 1e-14 * v.norm()) return v / v(1);
    return v / v(0);
}

}  // namespace

void PhysicalParams::validate() const {
    require_positive(h1, "h1");
    require_positive(h2, "h2");
    require_positive(h3, "h3");
    require_positive(H, "H");
    require_positive(W, "W");
    require_positive(L, "L");
    require_positive(Y, "Y");
    require_positive(f, "f");
    require_positive(alpha_T, "alpha_T");
    if (std::abs(h1 + h2 + h3 - H) > 1e-9 * H) {
        std::ostringstream os;
        os << "layer thicknesses must sum to H (h1+h2+h3=" << h1 + h2 + h3 << ", H=" << H << ")";
        throw ConfigError(os.str());
    }
    if (!std::isfinite(kappa) || kappa < 0.0) throw ConfigError("kappa must be non-negative");
}

Mat2 ModelCoeffs::A() const {
    Mat2 m;
    m << a1, b1, a2, b2;
    return m;
}

Mat2 ModelCoeffs::B() const {
    Mat2 m;
    m << beta1, beta2, 0.0, beta3;
    return m;
}

double ModelCoeffs::discriminant() const {
    return (a1 + b2) * (a1 + b2) - 4.0 * a1 * b2 + 4.0 * a2 * b1;
}

ModelCoeffs derive_coeffs(const PhysicalParams& p, double alpha) {
    p.validate();
    const double G = p.dT - p.alpha_S / p.alpha_T * p.dS;
    const double Ty = 2.0 / p.L * G;
    const double Tz = -2.0 * p.C / (p.h1 + p.h2) * G;
    const double k = p.alpha_T * p.g / (2.0 * p.H * p.f);
    const double bf = p.beta / (2.0 * p.f);
    const double s = p.Y / p.W;
    const double h1 = p.h1, h2 = p.h2, h3 = p.h3;

    ModelCoeffs c;
    c.a1 = s * (k * (-h1 * (h2 + h3) * Ty + bf * h1 * h1 * (h2 + h3) * Tz) - p.u_bar);
    c.b1 = s * k * (-h2 * (h2 + 2 * h3) * Ty + bf * h1 * h2 * (h2 + 2 * h3) * Tz);
    c.c1 = s * k * (-h3 * h3 * Ty + bf * h1 * h3 * h3 * Tz);
    c.a2 = s * k * (h1 * h1 * Ty + bf * h1 * h1 * (h2 + 2 * h3) * Tz);
    c.b2 = s * (k * (-h2 * (h3 - h1) * Ty + bf * (4 * h1 * h2 * h3 + h2 * h2 * (h1 + h3)) * Tz) - p.u_bar);
    c.c2 = s * k * (-h3 * h3 * Ty + bf * h3 * h3 * (2 * h1 + h2) * Tz);
    c.kappa_s = p.kappa * p.Y / (p.W * p.W);
    c.alpha = alpha;
    c.beta1 = p.Y * (p.beta / p.f * p.v_bar + 2.0 / h1 * p.w_bar);
    c.beta2 = -p.Y * 4.0 / h1 * p.w_bar;
    c.beta3 = p.Y * (p.beta / p.f * p.v_bar + 2.0 / h2 * p.w_bar);
    return c;
}

Speeds characteristic_speeds(double a1, double b1, double a2, double b2) {
    const double disc = (a1 - b2) * (a1 - b2) + 4.0 * a2 * b1;
    if (!(disc > 0.0)) {
        std::ostringstream os;
        os << "degenerate characteristics: discriminant " << disc << " <= 0";
        throw DegenerateCharacteristics(os.str());
    }
    const double r = std::sqrt(disc);
    const double tr = a1 + b2;
    // Avoid cancellation in the smaller root.
    const double big = tr >= 0 ? 0.5 * (tr + r) : 0.5 * (tr - r);
    const double det = a1 * b2 - a2 * b1;
    const double small = big != 0.0 ? det / big : 0.5 * (tr - r);
    Speeds s;
    s.l_plus = std::max(big, small);
    s.l_minus = std::min(big, small);
    return s;
}

CouplingPair moc_coupling_closed_form(const ModelCoeffs& c) {
    if (c.a2 == 0.0) throw DegenerateCharacteristics("closed-form coupling needs a2 != 0");
    const Speeds s = characteristic_speeds(c.a1, c.b1, c.a2, c.b2);
    const double lp = s.l_plus, lm = s.l_minus, d = lp - lm;
    Mat2 C1;
    C1 << (lm - c.a1) / d, (lp - c.a1) * (lm - c.a1) / (c.a2 * d),
          -c.a2 / d, -(lp - c.a1) / d;
    // The printed (2,2) entry of the second matrix carries the wrong sign
    // pattern; C1 + C2 = -I fixes it.
    Mat2 C2;
    C2 << -(lp - c.a1) / d, -(lp - c.a1) * (lm - c.a1) / (c.a2 * d),
          c.a2 / d, (lm - c.a1) / d;
    return {C1, C2};
}

CouplingPair mz_coupling_constants(const ModelCoeffs& c) {
    if (c.a2 == 0.0) throw DegenerateCharacteristics("MZ coupling constants need a2 != 0");
    const double disc = c.discriminant();
    if (!(disc > 0.0)) throw DegenerateCharacteristics("degenerate characteristics");
    const double r = std::sqrt(disc);
    const double wp = (c.a1 - c.b2 + r) / (2.0 * c.a2);
    const double wm = (c.a1 - c.b2 - r) / (2.0 * c.a2);
    const double dw = wp - wm;
    const double ka = -c.a1 + wm * c.a2, kb = -c.b1 + wm * c.b2;
    const double ja = -c.a1 + wp * c.a2, jb = -c.b1 + wp * c.b2;
    Mat2 Mp, Mm;
    Mp << (c.a1 * wp + c.b1) * ka / dw, (c.a1 * wp + c.b1) * kb / dw,
          (c.a2 * wp + c.b2) * ka / dw, (c.a2 * wp + c.b2) * kb / dw;
    Mm << -(c.a1 * wm + c.b1) * ja / dw, -(c.a1 * wm + c.b1) * jb / dw,
          -(c.a2 * wm + c.b2) * ja / dw, -(c.a2 * wm + c.b2) * jb / dw;
    return {Mp, Mm};
}

WaveStructure derive_wave_structure(const ModelCoeffs& c) {
    const Speeds s = characteristic_speeds(c.a1, c.b1, c.a2, c.b2);
    WaveStructure ws;
    ws.l_plus = s.l_plus;
    ws.l_minus = s.l_minus;
    ws.tau_plus = 1.0 / s.l_plus;
    ws.tau_minus = 1.0 / s.l_minus;

    const Mat2 A = c.A();
    ws.v_plus = eigenvector(A, s.l_plus);
    ws.v_minus = eigenvector(A, s.l_minus);
    ws.T_P.col(0) = ws.v_minus;
    ws.T_P.col(1) = ws.v_plus;
    ws.T_P_inv = ws.T_P.inverse();

    if (c.a2 != 0.0) {
        const double r = std::sqrt(c.discriminant());
        ws.w_plus = (c.a1 - c.b2 + r) / (2.0 * c.a2);
        ws.w_minus = (c.a1 - c.b2 - r) / (2.0 * c.a2);
        const CouplingPair C = moc_coupling_closed_form(c);
        ws.C1 = C.first;
        ws.C2 = C.second;
        const CouplingPair M = mz_coupling_constants(c);
        ws.M_plus = M.first;
        ws.M_minus = M.second;
    } else {
        // Triangular case: eigenvectors from A directly.
        ws.w_plus = ws.v_plus(1) != 0.0 ? ws.v_plus(0) / ws.v_plus(1) : INFINITY;
        ws.w_minus = ws.v_minus(1) != 0.0 ? ws.v_minus(0) / ws.v_minus(1) : INFINITY;
        Mat2 Pp = ws.T_P * (Vec2(0.0, 1.0)).asDiagonal() * ws.T_P_inv;
        Mat2 Pm = ws.T_P * (Vec2(1.0, 0.0)).asDiagonal() * ws.T_P_inv;
        ws.C1 = -Pp;
        ws.C2 = -Pm;
        ws.M_plus = -s.l_plus * s.l_plus * Pp;
        ws.M_minus = -s.l_minus * s.l_minus * Pm;
    }
    return ws;
}

ExpansionCoeffs expansion_coeffs(const ModelCoeffs& c) {
    const double disc = c.discriminant();
    if (!(disc > 0.0)) throw DegenerateCharacteristics("degenerate characteristics");
    const double r = std::sqrt((c.a1 - c.b2) * (c.a1 - c.b2) + 4.0 * c.a2 * c.b1);
    const double cross = (c.a1 - c.b2) * (c.beta1 - c.beta3) + 2.0 * c.a2 * c.beta2;
    ExpansionCoeffs e;
    e.l0_plus = 0.5 * (c.a1 + c.b2 + r);
    e.l0_minus = 0.5 * (c.a1 + c.b2 - r);
    e.l1_plus = 0.5 * (c.beta1 + c.beta3 + cross / r);
    e.l1_minus = 0.5 * (c.beta1 + c.beta3 - cross / r);
    return e;
}

Speeds extended_speeds(const ModelCoeffs& c, double dx) {
    return characteristic_speeds(c.a1 + dx * c.beta1, c.b1 + dx * c.beta2, c.a2, c.b2 + dx * c.beta3);
}

PhysicalParams scale_basin_width(const PhysicalParams& p, double W_new) {
    require_positive(W_new, "W_new");
    PhysicalParams q = p;
    q.W = W_new;
    return q;
}

ModelCoeffs with_betas(ModelCoeffs c, double beta1, double beta2, double beta3) {
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.beta3 = beta3;
    return c;
}

}  // namespace amodelay
