#pragma once

#include <array>
#include <cmath>

#include "noether/framework.hpp"
#include "noether/ode.hpp"

namespace noether::cms {

/// Three particles on a line with inverse-square pair potential
/// V = k sum (x_i - x_j)^-2, k > 0.  Positions stay ordered (the potential
/// wall prevents crossings), so the displacement product has a fixed sign
/// along every trajectory.

struct Params {
    double k = 1.0;
    double ktilde() const { return 20.25 * k; }  // (9/2)^2 k
};

inline double pair_v(double k, double d) { return k / (d * d); }

inline double potential(const Params& par, const State& s) {
    double d12 = s.q[0] - s.q[1], d23 = s.q[1] - s.q[2], d31 = s.q[2] - s.q[0];
    if (d12 == 0 || d23 == 0 || d31 == 0) throw Collision("cms: coincident particles");
    return pair_v(par.k, d12) + pair_v(par.k, d23) + pair_v(par.k, d31);
}

inline Vec cms_rhs(const Params& par, const State& s) {
    double d12 = s.q[0] - s.q[1], d13 = s.q[0] - s.q[2], d23 = s.q[1] - s.q[2];
    if (d12 == 0 || d13 == 0 || d23 == 0) throw Collision("cms: coincident particles");
    double k2 = 2.0 * par.k;
    auto cube = [](double d) { return d * d * d; };
    return Vec{k2 * (1.0 / cube(d12) + 1.0 / cube(d13)),
               k2 * (1.0 / cube(-d12) + 1.0 / cube(d23)),
               k2 * (1.0 / cube(-d13) + 1.0 / cube(-d23))};
}

inline SystemDef make_system(const Params& par) {
    SystemDef sys;
    sys.n_dof = 3;
    sys.name = "cms";
    sys.force = [par](const State& s) { return cms_rhs(par, s); };
    sys.lagrangian = [par](const State& s) {
        return 0.5 * dot(s.qdot, s.qdot) - potential(par, s);
    };
    sys.hessian_fn = [](const State&) { return Mat::identity(3); };
    sys.mixed_fn = [](const State&) { return Mat(3); };
    return sys;
}

struct Integrals {
    double P, E, K, E_dil, E_conf, C1, C2, C3, C4;
};

/// The displacement combination A = (x2-x3) xd1 + (x3-x1) xd2 + (x1-x2) xd3.
inline double a_combination(const State& s) {
    return (s.q[1] - s.q[2]) * s.qdot[0] + (s.q[2] - s.q[0]) * s.qdot[1] +
           (s.q[0] - s.q[1]) * s.qdot[2];
}

inline Integrals cms_integrals(const Params& par, const State& s) {
    double V = potential(par, s);
    double P = s.qdot[0] + s.qdot[1] + s.qdot[2];
    double E = 0.5 * dot(s.qdot, s.qdot) + V;
    double Q = s.q[0] + s.q[1] + s.q[2];
    double M = s.q[0] * s.qdot[0] + s.q[1] * s.qdot[1] + s.q[2] * s.qdot[2];
    double X2 = dot(s.q, s.q);
    Integrals r;
    r.P = P;
    r.E = E;
    r.K = s.t * P - Q;
    r.E_dil = s.t * E - 0.5 * M;
    r.E_conf = s.t * s.t * E - s.t * M + 0.5 * X2;
    r.C1 = Q * E - 0.5 * P * M;
    r.C2 = 0.5 * X2 * E - 0.25 * M * M;
    double A = a_combination(s);
    double prod = (s.q[1] - s.q[2]) * (s.q[0] - s.q[1]) * (s.q[2] - s.q[0]);
    double vk = V / par.k;
    r.C3 = 3.0 * A * A + 12.0 * par.k * prod * vk * std::sqrt(vk);
    double v1 = pair_v(par.k, s.q[1] - s.q[2]);
    double v2 = pair_v(par.k, s.q[2] - s.q[0]);
    double v3 = pair_v(par.k, s.q[0] - s.q[1]);
    r.C4 = (s.qdot[0] * s.qdot[0] * s.qdot[0] + s.qdot[1] * s.qdot[1] * s.qdot[1] +
            s.qdot[2] * s.qdot[2] * s.qdot[2]) /
               3.0 +
           (s.qdot[0] + s.qdot[1]) * v3 + (s.qdot[1] + s.qdot[2]) * v1 +
           (s.qdot[2] + s.qdot[0]) * v2;
    return r;
}

struct IdentityResiduals {
    double factorization;   // (6E - P^2) C2 - C1^2 - (1/6) E C3
    double factorization_displayed;  // same with the printed 2/3 coefficient
    double pt_k;            // P T - K - 6 (6E - P^2)^-1 C1
    double scal_E;          // Etilde(polar) - (3/2 E - P^2/4)
    double scal_C3;         // C3tilde(polar) - C3/8
};

/// Center-of-mass / polar reduction: y = x1 - (x2+x3)/2, z = x2 - x3,
/// y = r cos(phi), (sqrt(3)/2) z = r sin(phi).
struct PolarState {
    double t = 0.0;
    double xbar, r, phi;
    double rdot, phidot, P;
    int sgn_r = 1, sgn_phi = 1;  // carried branch signs
};

inline PolarState cms_to_polar(const Params&, const State& s) {
    PolarState p;
    p.t = s.t;
    p.xbar = (s.q[0] + s.q[1] + s.q[2]) / 3.0;
    double y = s.q[0] - 0.5 * (s.q[1] + s.q[2]);
    double z = s.q[1] - s.q[2];
    {
        double gap = std::min({std::fabs(s.q[0] - s.q[1]), std::fabs(s.q[1] - s.q[2]),
                               std::fabs(s.q[2] - s.q[0])});
        double scale = std::hypot(y, 0.5 * std::sqrt(3.0) * z);
        if (gap < 1e-6 * scale) throw Collision("cms_to_polar: collision neighborhood");
    }
    double w = 0.5 * std::sqrt(3.0) * z;
    p.r = std::hypot(y, w);
    p.phi = std::atan2(w, y);
    double yd = s.qdot[0] - 0.5 * (s.qdot[1] + s.qdot[2]);
    double zd = s.qdot[1] - s.qdot[2];
    double wd = 0.5 * std::sqrt(3.0) * zd;
    p.rdot = (y * yd + w * wd) / p.r;
    p.phidot = (y * wd - w * yd) / (p.r * p.r);
    p.P = s.qdot[0] + s.qdot[1] + s.qdot[2];
    p.sgn_r = (p.rdot >= 0) ? 1 : -1;
    p.sgn_phi = (p.phidot >= 0) ? 1 : -1;
    return p;
}

inline State cms_from_polar(const Params&, const PolarState& p) {
    double y = p.r * std::cos(p.phi);
    double z = 2.0 / std::sqrt(3.0) * p.r * std::sin(p.phi);
    double yd = p.rdot * std::cos(p.phi) - p.r * std::sin(p.phi) * p.phidot;
    double zd = 2.0 / std::sqrt(3.0) * (p.rdot * std::sin(p.phi) + p.r * std::cos(p.phi) * p.phidot);
    State s;
    s.t = p.t;
    s.q = Vec{p.xbar + 2.0 * y / 3.0, p.xbar - y / 3.0 + 0.5 * z, p.xbar - y / 3.0 - 0.5 * z};
    double xbd = p.P / 3.0;
    s.qdot = Vec{xbd + 2.0 * yd / 3.0, xbd - yd / 3.0 + 0.5 * zd, xbd - yd / 3.0 - 0.5 * zd};
    return s;
}

/// Rest-frame invariants in the scaled variables.
struct Scaled {
    double Etil, C3til, kappa;  // kappa = ktilde / (2 C3til)
};

inline Scaled scaled_invariants(const Params& par, const Integrals& I) {
    Scaled sc;
    sc.Etil = 1.5 * I.E - 0.25 * I.P * I.P;
    sc.C3til = I.C3 / 8.0;
    sc.kappa = par.ktilde() / (2.0 * sc.C3til);
    return sc;
}

inline IdentityResiduals cms_identities(const Params& par, const State& s) {
    Integrals I = cms_integrals(par, s);
    double six = 6.0 * I.E - I.P * I.P;
    if (std::fabs(six) < 1e-12) throw DegenerateEnergy("cms_identities: 6E = P^2");
    IdentityResiduals r;
    r.factorization = six * I.C2 - I.C1 * I.C1 - I.E * I.C3 / 6.0;
    r.factorization_displayed = six * I.C2 - I.C1 * I.C1 - 2.0 * I.E * I.C3 / 3.0;
    // polar cross-checks
    PolarState p = cms_to_polar(par, s);
    double Etil_polar = 0.5 * (p.rdot * p.rdot + p.r * p.r * p.phidot * p.phidot) +
                        0.5 * par.ktilde() / (p.r * p.r) /
                            (std::sin(3 * p.phi) * std::sin(3 * p.phi));
    double c3til_polar = 0.5 * std::pow(p.r, 4) * p.phidot * p.phidot +
                         0.5 * par.ktilde() / (std::sin(3 * p.phi) * std::sin(3 * p.phi));
    Scaled sc = scaled_invariants(par, I);
    r.scal_E = Etil_polar - sc.Etil;
    r.scal_C3 = c3til_polar - sc.C3til;
    // T enters through the combination P T - K; expanding the definitions
    // gives P T - K = 6 C1 / (6E - P^2) exactly (the printed coefficient 3
    // is off by two)
    double Q = s.q[0] + s.q[1] + s.q[2];
    double M = s.q[0] * s.qdot[0] + s.q[1] * s.qdot[1] + s.q[2] * s.qdot[2];
    double T = s.t + (Q * I.P - 3.0 * M) / six;
    r.pt_k = I.P * T - I.K - 6.0 * I.C1 / six;
    return r;
}

/// T = t + (6E - P^2)^-1 ((x1+x2+x3) P - 3 sum x xdot); globally continuous.
inline double cms_T(const Params& par, const State& s) {
    Integrals I = cms_integrals(par, s);
    double six = 6.0 * I.E - I.P * I.P;
    if (std::fabs(six) < 1e-12) throw DegenerateEnergy("cms_T: 6E = P^2");
    double Q = s.q[0] + s.q[1] + s.q[2];
    double M = s.q[0] * s.qdot[0] + s.q[1] * s.qdot[1] + s.q[2] * s.qdot[2];
    return s.t + (Q * I.P - 3.0 * M) / six;
}

/// Psi in the polar representation (primary path).  The angular term carries
/// sgn(sin 3phi) so the expression is conserved on both ordering wedges (the
/// particle ordering fixes the sign of sin 3phi along a trajectory).
inline double cms_Psi(const Params& par, const State& s) {
    Integrals I = cms_integrals(par, s);
    if (I.C3 <= 0) throw DomainError("cms_Psi: needs C3 > 0");
    Scaled sc = scaled_invariants(par, I);
    PolarState p = cms_to_polar(par, s);
    double s3 = std::sin(3 * p.phi), c3 = std::cos(3 * p.phi);
    double rad = s3 * s3 - sc.kappa;
    if (rad < -1e-12) throw DomainError("cms_Psi: outside the angular region");
    rad = std::max(rad, 0.0);
    double w0 = std::atan2(std::sqrt(rad), c3);  // in [0, pi], continuous across cos = 0
    double w = p.sgn_phi * ((s3 >= 0) ? 1.0 : -1.0) * w0;
    double f2 = (sc.Etil / sc.C3til) * p.r * p.r - 1.0;
    if (f2 < -1e-12) throw DomainError("cms_Psi: r below the radial turning point");
    double F = std::sqrt(std::max(f2, 0.0));
    return w - p.sgn_r * 3.0 * std::atan(F);
}

/// Alternative algebraic route through the velocity-cubic constant.
inline double cms_Psi_from_C4(const Params& par, const State& s) {
    Integrals I = cms_integrals(par, s);
    if (I.C3 <= 0) throw DomainError("cms_Psi_from_C4: needs C3 > 0");
    Scaled sc = scaled_invariants(par, I);
    PolarState p = cms_to_polar(par, s);
    double c4til = 13.5 * I.C4 - 9.0 * I.P * I.E + I.P * I.P * I.P;
    double denom2 = (1.0 - sc.kappa) * std::pow(2.0 * sc.Etil, 3) - c4til * c4til;
    if (denom2 <= 0) throw DomainError("cms_Psi_from_C4: degenerate radical");
    double s3 = std::sin(3 * p.phi);
    double t = p.sgn_phi * p.sgn_r * ((s3 >= 0) ? 1.0 : -1.0) * c4til / std::sqrt(denom2);
    return std::atan(t);
}

/// Residual of the trajectory-shape relation in the y-z plane:
/// cos 3phi = sqrt(1 - kappa) cos(w0) with w0 recovered from Psi and the
/// radial phase 3 atan F.
inline double cms_shape_residual(const Params& par, const State& s, double psi_value) {
    Integrals I = cms_integrals(par, s);
    Scaled sc = scaled_invariants(par, I);
    PolarState p = cms_to_polar(par, s);
    double f2 = (sc.Etil / sc.C3til) * p.r * p.r - 1.0;
    double F = std::sqrt(std::max(f2, 0.0));
    double alpha = 3.0 * std::atan(F);
    return std::cos(3 * p.phi) -
           std::sqrt(1.0 - sc.kappa) * std::cos(psi_value + p.sgn_r * alpha);
}

namespace detail {

/// Velocity reconstruction from invariants at a transformed polar point,
/// branch signs carried through unchanged.
inline PolarState rebuild(const Params& par, PolarState p, double Etil, double C3til) {
    double s3 = std::sin(3 * p.phi);
    double w2 = 2.0 * C3til - par.ktilde() / (s3 * s3);
    if (w2 < -1e-10) throw DomainError("cms group: angular turning range violated");
    p.phidot = p.sgn_phi * std::sqrt(std::max(w2, 0.0)) / (p.r * p.r);
    double r2 = 2.0 * (Etil - C3til / (p.r * p.r));
    if (r2 < -1e-10) throw DomainError("cms group: radial turning range violated");
    p.rdot = p.sgn_r * std::sqrt(std::max(r2, 0.0));
    return p;
}

}  // namespace detail

/// One-parameter group generated by C3' = exp(sqrt(C3)/3): a rotation of the
/// angular phase at fixed xbar, r, C3.
inline PolarState cms_group_C3(const Params& par, const PolarState& p, const Integrals& I,
                               double eps) {
    if (eps == 0.0) return p;
    if (I.C3 <= 0) throw DomainError("cms_group_C3: needs C3 > 0");
    double c3p = std::exp(std::sqrt(I.C3) / 3.0);
    double s3 = std::sin(3 * p.phi), c3 = std::cos(3 * p.phi);
    double rad = s3 * s3 - 4.0 * par.ktilde() / I.C3;
    if (rad < -1e-12) throw DomainError("cms_group_C3: radicand negative");
    rad = std::max(rad, 0.0);
    double ang = 3.0 * c3p * eps;
    double wedge = (s3 >= 0) ? 1.0 : -1.0;
    double c3new = std::cos(ang) * c3 - p.sgn_phi * wedge * std::sin(ang) * std::sqrt(rad);
    if (std::fabs(c3new) > 1.0) throw DomainError("cms_group_C3: left admissible wedge");
    double s3new = ((s3 >= 0) ? 1.0 : -1.0) * std::sqrt(1.0 - c3new * c3new);
    PolarState out = p;
    out.phi = std::atan2(s3new, c3new) / 3.0 + 2.0 * M_PI / 3.0 * std::round((3.0 * p.phi - std::atan2(s3new, c3new)) / (2.0 * M_PI));
    Scaled sc = scaled_invariants(par, I);
    return detail::rebuild(par, out, sc.Etil, sc.C3til);
}

/// Group generated by T: shifts the energy, E -> E + eps, at fixed r, P, C3.
inline PolarState cms_group_T(const Params& par, const PolarState& p, const Integrals& I,
                              double eps) {
    if (eps == 0.0) return p;
    double sixE = 6.0 * I.E - I.P * I.P;
    double sixEd = sixE + 6.0 * eps;
    double r2 = p.r * p.r;
    if (2.0 * sixEd * r2 < I.C3)
        throw DomainError("cms_group_T: transformed radial range violated");
    auto radf = [&](double six) { return std::sqrt(2.0 * six * r2 - I.C3); };
    double R = p.sgn_r * (2.0 / 45.0) / (r2 * r2) *
               (std::pow(radf(sixEd), 3) * (3.0 * sixEd * r2 + I.C3) -
                std::pow(radf(sixE), 3) * (3.0 * sixE * r2 + I.C3));
    double s3 = std::sin(3 * p.phi), c3 = std::cos(3 * p.phi);
    double rad = s3 * s3 - 4.0 * par.ktilde() / I.C3;
    if (rad < -1e-12) throw DomainError("cms_group_T: radicand negative");
    rad = std::max(rad, 0.0);
    double ang = R * std::sqrt(I.C3);
    double wedge = (s3 >= 0) ? 1.0 : -1.0;
    double c3new = std::cos(ang) * c3 - p.sgn_phi * wedge * std::sin(ang) * std::sqrt(rad);
    if (std::fabs(c3new) > 1.0) throw DomainError("cms_group_T: left admissible wedge");
    double s3new = ((s3 >= 0) ? 1.0 : -1.0) * std::sqrt(1.0 - c3new * c3new);
    PolarState out = p;
    out.phi = std::atan2(s3new, c3new) / 3.0 + 2.0 * M_PI / 3.0 * std::round((3.0 * p.phi - std::atan2(s3new, c3new)) / (2.0 * M_PI));
    // the gauge flow also advances t; the center of mass rides along at P/3,
    // which is exactly the displayed xbar shift
    double dt = p.sgn_r * (radf(sixEd) / sixEd - radf(sixE) / sixE);
    out.t = p.t + dt;
    out.xbar = p.xbar + (I.P / 3.0) * dt;
    Integrals Id = I;
    Id.E = I.E + eps;
    Scaled sc = scaled_invariants(par, Id);
    return detail::rebuild(par, out, sc.Etil, sc.C3til);
}

/// Group generated by Psi: rescales C3 via sqrt(C3) -> sqrt(C3) - 9 eps while
/// preserving E, P, T, Psi.
inline PolarState cms_group_Psi(const Params& par, const PolarState& p, const Integrals& I,
                                double eps) {
    if (eps == 0.0) return p;
    if (I.C3 <= 0) throw DomainError("cms_group_Psi: needs C3 > 0");
    double sq = std::sqrt(I.C3) - 9.0 * eps;
    if (sq <= 0) throw DomainError("cms_group_Psi: C3-dagger collapses");
    double C3d = sq * sq;
    Scaled sc = scaled_invariants(par, I);
    double C3til_d = C3d / 8.0;
    double kappa_d = par.ktilde() / (2.0 * C3til_d);
    if (kappa_d > 1.0) throw DomainError("cms_group_Psi: transformed kappa > 1");
    // T preservation fixes the transformed radius
    double r2 = p.r * p.r + (C3til_d - sc.C3til) / sc.Etil;
    if (r2 <= 0 || sc.Etil * r2 < C3til_d)
        throw DomainError("cms_group_Psi: transformed radius out of range");
    double psi = 0.0;
    {
        // Psi of the source state (same convention as cms_Psi)
        double s3 = std::sin(3 * p.phi), c3 = std::cos(3 * p.phi);
        double rad = std::max(s3 * s3 - sc.kappa, 0.0);
        double w0 = std::atan2(std::sqrt(rad), c3);
        psi = p.sgn_phi * ((s3 >= 0) ? 1.0 : -1.0) * w0 -
              p.sgn_r * 3.0 * std::atan(std::sqrt(std::max(
                            (sc.Etil / sc.C3til) * p.r * p.r - 1.0, 0.0)));
    }
    double Fd = std::sqrt(std::max((sc.Etil / C3til_d) * r2 - 1.0, 0.0));
    double alpha_d = 3.0 * std::atan(Fd);
    // signed shape relation: cos(3 phi) = sqrt(1-kappa) cos(w0-dagger) with
    // w0-dagger = sgn(phidot) sgn(sin 3phi) (Psi + sgn(rdot) alpha)
    double c3new = std::sqrt(1.0 - kappa_d) * std::cos(psi + p.sgn_r * alpha_d);
    if (std::fabs(c3new) > 1.0) throw DomainError("cms_group_Psi: left admissible wedge");
    double s3new = ((std::sin(3 * p.phi) >= 0) ? 1.0 : -1.0) * std::sqrt(1.0 - c3new * c3new);
    PolarState out = p;
    out.r = std::sqrt(r2);
    out.phi = std::atan2(s3new, c3new) / 3.0 + 2.0 * M_PI / 3.0 * std::round((3.0 * p.phi - std::atan2(s3new, c3new)) / (2.0 * M_PI));
    return detail::rebuild(par, out, sc.Etil, C3til_d);
}

// --- scalar fields and characteristics for the bracket machinery ---

inline ScalarField field_P(const Params&) {
    return ScalarField{[](const State& s) { return s.qdot[0] + s.qdot[1] + s.qdot[2]; },
                       FieldKind::constant_of_motion, "P"};
}
inline ScalarField field_E(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).E; },
                       FieldKind::constant_of_motion, "E"};
}
inline ScalarField field_K(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).K; },
                       FieldKind::temporal_integral, "K"};
}
inline ScalarField field_Edil(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).E_dil; },
                       FieldKind::temporal_integral, "E_dil"};
}
inline ScalarField field_Econf(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).E_conf; },
                       FieldKind::temporal_integral, "E_conf"};
}
inline ScalarField field_C1(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).C1; },
                       FieldKind::constant_of_motion, "C1"};
}
inline ScalarField field_C2(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).C2; },
                       FieldKind::constant_of_motion, "C2"};
}
inline ScalarField field_C3(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).C3; },
                       FieldKind::constant_of_motion, "C3"};
}
inline ScalarField field_C4(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_integrals(par, s).C4; },
                       FieldKind::constant_of_motion, "C4"};
}
inline ScalarField field_C3prime(const Params& par) {
    return ScalarField{[par](const State& s) {
                           double c3 = cms_integrals(par, s).C3;
                           if (c3 <= 0) throw DomainError("C3' needs C3 > 0");
                           return std::exp(std::sqrt(c3) / 3.0);
                       },
                       FieldKind::constant_of_motion, "C3p"};
}
inline ScalarField field_T(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_T(par, s); },
                       FieldKind::temporal_integral, "T"};
}
inline ScalarField field_Psi(const Params& par) {
    return ScalarField{[par](const State& s) { return cms_Psi(par, s); },
                       FieldKind::constant_of_motion, "Psi"};
}

inline SymmetryField x_of_P(const Params&) {
    return SymmetryField{[](const State&) { return Vec{1.0, 1.0, 1.0}; }, nullptr, "X(P)"};
}
inline SymmetryField x_of_E(const Params&) {
    return SymmetryField{[](const State& s) { return s.qdot; }, nullptr, "X(E)"};
}
inline SymmetryField x_of_K(const Params&) {
    return SymmetryField{[](const State& s) { return Vec{s.t, s.t, s.t}; }, nullptr, "X(K)"};
}
inline SymmetryField x_of_Edil(const Params&) {
    // characteristic of the dilation-type integral: t xdot - x/2
    return SymmetryField{[](const State& s) {
                             return Vec{s.t * s.qdot[0] - 0.5 * s.q[0],
                                        s.t * s.qdot[1] - 0.5 * s.q[1],
                                        s.t * s.qdot[2] - 0.5 * s.q[2]};
                         },
                         nullptr, "X(E_dil)"};
}
inline SymmetryField x_of_Econf(const Params&) {
    return SymmetryField{[](const State& s) {
                             return Vec{s.t * (s.t * s.qdot[0] - s.q[0]),
                                        s.t * (s.t * s.qdot[1] - s.q[1]),
                                        s.t * (s.t * s.qdot[2] - s.q[2])};
                         },
                         nullptr, "X(E_conf)"};
}
inline SymmetryField x_of_C3(const Params&) {
    return SymmetryField{[](const State& s) {
                             double A = a_combination(s);
                             return Vec{6.0 * A * (s.q[1] - s.q[2]), 6.0 * A * (s.q[2] - s.q[0]),
                                        6.0 * A * (s.q[0] - s.q[1])};
                         },
                         nullptr, "X(C3)"};
}
inline SymmetryField x_of_C4(const Params& par) {
    return SymmetryField{[par](const State& s) {
                             double v1 = pair_v(par.k, s.q[1] - s.q[2]);
                             double v2 = pair_v(par.k, s.q[2] - s.q[0]);
                             double v3 = pair_v(par.k, s.q[0] - s.q[1]);
                             return Vec{s.qdot[0] * s.qdot[0] + v2 + v3,
                                        s.qdot[1] * s.qdot[1] + v1 + v3,
                                        s.qdot[2] * s.qdot[2] + v1 + v2};
                         },
                         nullptr, "X(C4)"};
}
inline SymmetryField x_of_C3prime(const Params& par) {
    return SymmetryField{[par](const State& s) {
                             double c3 = cms_integrals(par, s).C3;
                             if (c3 <= 0) throw DomainError("X(C3') needs C3 > 0");
                             double scale = std::exp(std::sqrt(c3) / 3.0) / (6.0 * std::sqrt(c3));
                             double A = a_combination(s);
                             return Vec{6.0 * scale * A * (s.q[1] - s.q[2]),
                                        6.0 * scale * A * (s.q[2] - s.q[0]),
                                        6.0 * scale * A * (s.q[0] - s.q[1])};
                         },
                         nullptr, "X(C3p)"};
}
inline SymmetryField x_of_T(const Params& par) {
    return SymmetryField{[par](const State& s) {
                             Integrals I = cms_integrals(par, s);
                             double six = 6.0 * I.E - I.P * I.P;
                             double Q = s.q[0] + s.q[1] + s.q[2];
                             double M = s.q[0] * s.qdot[0] + s.q[1] * s.qdot[1] +
                                        s.q[2] * s.qdot[2];
                             double pre = (Q * I.P - 3.0 * M) / (six * six);
                             Vec out(3);
                             for (int i = 0; i < 3; ++i)
                                 out[i] = pre * (2.0 * I.P - 6.0 * s.qdot[i]) +
                                          (Q - 3.0 * s.q[i]) / six;
                             return out;
                         },
                         nullptr, "X(T)"};
}

inline std::vector<EventSpec> cms_events(const Params& par) {
    std::vector<EventSpec> ev;
    ev.push_back({"radial_turning",
                  [par](const State& s) {
                      PolarState p = cms_to_polar(par, s);
                      return p.r * p.rdot;  // smooth surrogate for rdot = 0
                  },
                  EventSpec::Direction::any});
    ev.push_back({"angular_turning",
                  [par](const State& s) { return cms_to_polar(par, s).phidot; },
                  EventSpec::Direction::any});
    return ev;
}

}  // namespace noether::cms
