#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "noether/ellint.hpp"
#include "noether/framework.hpp"
#include "noether/ode.hpp"
#include "noether/quadrature.hpp"

namespace noether::spheroid {

/// Geodesics on a spheroid with aspect ratio R, coordinates q = (theta, phi),
/// line element sin^2(theta) dphi^2 + (cos^2 + R^2 sin^2) dtheta^2.

struct Params {
    double R = 1.0;
};

inline double g_theta(const Params& par, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    return c * c + par.R * par.R * s * s;
}

inline SystemDef make_system(const Params& par) {
    SystemDef sys;
    sys.n_dof = 2;
    sys.name = "spheroid";
    double R = par.R;
    sys.force = [R](const State& s) {
        double th = s.q[0], sn = std::sin(th), cs = std::cos(th);
        if (std::fabs(sn) < 1e-12) throw PoleSingularity("spheroid: sin(theta) = 0");
        double thd = s.qdot[0], phd = s.qdot[1];
        double gth = cs * cs + R * R * sn * sn;
        double thdd = sn * cs * (phd * phd + (1.0 - R * R) * thd * thd) / gth;
        double phdd = -2.0 * (cs / sn) * phd * thd;
        return Vec{thdd, phdd};
    };
    sys.lagrangian = [R](const State& s) {
        double th = s.q[0], sn = std::sin(th), cs = std::cos(th);
        double gth = cs * cs + R * R * sn * sn;
        return 0.5 * (sn * sn * s.qdot[1] * s.qdot[1] + gth * s.qdot[0] * s.qdot[0]);
    };
    sys.hessian_fn = [R](const State& s) {
        double th = s.q[0], sn = std::sin(th), cs = std::cos(th);
        Mat g(2);
        g(0, 0) = cs * cs + R * R * sn * sn;
        g(1, 1) = sn * sn;
        return g;
    };
    sys.mixed_fn = [R](const State& s) {
        double th = s.q[0], s2 = std::sin(2.0 * th);
        Mat h(2);  // h_ij = d2L/dq^i dqdot^j, rows (theta, phi)
        h(0, 0) = (R * R - 1.0) * s2 * s.qdot[0];
        h(0, 1) = s2 * s.qdot[1];
        return h;
    };
    return sys;
}

struct Invariants {
    double L, E, C;
};

inline Invariants geo_invariants(const Params& par, const State& s) {
    double sn = std::sin(s.q[0]);
    double L = sn * sn * s.qdot[1];
    double E = 0.5 * (sn * sn * s.qdot[1] * s.qdot[1] +
                      g_theta(par, s.q[0]) * s.qdot[0] * s.qdot[0]);
    if (std::fabs(L) < 1e-14)
        throw ZeroAngularMomentum("geo_invariants: L = 0, C undefined");
    return {L, E, 2.0 * E / (L * L)};
}

inline std::pair<double, double> geo_turning(const Params&, double C) {
    if (C < 1.0) throw DomainError("geo_turning: C < 1");
    double th = std::asin(1.0 / std::sqrt(C));
    return {th, M_PI - th};
}

namespace detail {

// Both action-angle integrals reduce, with u = cos(theta) = Cbar sin(psi),
// to smooth integrands over psi in [psi_z, pi/2]:
//   calA = (R/sqrt(C)) int sqrt(1 - m sin^2) / (1 - n sin^2) dpsi
//   calB = (R/sqrt(C)) int sqrt(1 - m sin^2) dpsi
// with n = Cbar^2 = 1 - 1/C and m = n Rbar^2, Rbar^2 = 1 - 1/R^2 (either sign).
struct Reduced {
    double pref, n, m, psi_z;
};

inline Reduced reduce(const Params& par, double theta, double C) {
    if (C <= 1.0) throw DomainError("calA/calB: need C > 1");
    double n = 1.0 - 1.0 / C;
    double cbar = std::sqrt(n);
    double z = std::cos(theta) / cbar;
    if (z > 1.0 + 1e-12 || z < -1.0 - 1e-12)
        throw DomainError("calA/calB: theta outside the turning range");
    z = std::clamp(z, -1.0, 1.0);
    double rbar2 = 1.0 - 1.0 / (par.R * par.R);
    return {par.R / std::sqrt(C), n, n * rbar2, std::asin(z)};
}

}  // namespace detail

/// Azimuthal advance integral, quadrature path (source of truth).
inline double calA_quad(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return r.pref * integrate_adaptive(
                        [&](double psi) {
                            double s2 = std::sin(psi) * std::sin(psi);
                            return std::sqrt(1.0 - r.m * s2) / (1.0 - r.n * s2);
                        },
                        r.psi_z, M_PI / 2, opt);
}

/// Temporal integral, quadrature path.
inline double calB_quad(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return r.pref * integrate_adaptive(
                        [&](double psi) {
                            double s2 = std::sin(psi) * std::sin(psi);
                            return std::sqrt(1.0 - r.m * s2);
                        },
                        r.psi_z, M_PI / 2, opt);
}

/// Elliptic closed form of calA, validated against the quadrature path.
inline double calA_closed(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    double z = std::sin(r.psi_z);
    double R = par.R;
    double a = (R * R - 1.0) / (R * std::sqrt(C));
    double b = 1.0 / (R * std::sqrt(C));
    return a * (comp_k_m(r.m) - ellip_f_m(z, r.m)) + b * (comp_pi_m(r.n, r.m) - ellip_pi_m(z, r.n, r.m));
}

/// Elliptic closed form of calB.
inline double calB_closed(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    double z = std::sin(r.psi_z);
    return r.pref * (comp_e_m(r.m) - ellip_e_m(z, r.m));
}

inline double calA(const Params& par, double theta, double C) { return calA_quad(par, theta, C); }
inline double calB(const Params& par, double theta, double C) { return calB_quad(par, theta, C); }

/// dcalA/dC and dcalB/dC by differentiating the reduced integrals in their
/// parameters (everything smooth away from theta = theta*).
inline double calA_C(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    double JA = integrate_adaptive(
        [&](double psi) {
            double s2 = std::sin(psi) * std::sin(psi);
            return std::sqrt(1.0 - r.m * s2) / (1.0 - r.n * s2);
        },
        r.psi_z, M_PI / 2, opt);
    double dJ_dm = integrate_adaptive(
        [&](double psi) {
            double s2 = std::sin(psi) * std::sin(psi);
            return -0.5 * s2 / (std::sqrt(1.0 - r.m * s2) * (1.0 - r.n * s2));
        },
        r.psi_z, M_PI / 2, opt);
    double dJ_dn = integrate_adaptive(
        [&](double psi) {
            double s2 = std::sin(psi) * std::sin(psi);
            double d = 1.0 - r.n * s2;
            return std::sqrt(1.0 - r.m * s2) * s2 / (d * d);
        },
        r.psi_z, M_PI / 2, opt);
    double sz = std::sin(r.psi_z);
    double f_at_z = std::sqrt(1.0 - r.m * sz * sz) / (1.0 - r.n * sz * sz);
    double cbar = std::sqrt(r.n);
    double dcbar = 1.0 / (2.0 * cbar * C * C);      // d cbar / dC
    double dz = -sz / cbar * dcbar;                 // z = cos(theta)/cbar
    double cz = std::cos(r.psi_z);
    if (std::fabs(cz) < 1e-12) throw DomainError("calA_C: derivative singular at theta*");
    double dpsi_z = dz / cz;
    double rbar2 = 1.0 - 1.0 / (par.R * par.R);
    double dm = rbar2 / (C * C), dn = 1.0 / (C * C);
    double dpref = -par.R / (2.0 * C * std::sqrt(C));
    return dpref * JA + r.pref * (-f_at_z * dpsi_z + dJ_dm * dm + dJ_dn * dn);
}

inline double calB_C(const Params& par, double theta, double C) {
    auto r = detail::reduce(par, theta, C);
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    double JB = integrate_adaptive(
        [&](double psi) {
            double s2 = std::sin(psi) * std::sin(psi);
            return std::sqrt(1.0 - r.m * s2);
        },
        r.psi_z, M_PI / 2, opt);
    double dJ_dm = integrate_adaptive(
        [&](double psi) {
            double s2 = std::sin(psi) * std::sin(psi);
            return -0.5 * s2 / std::sqrt(1.0 - r.m * s2);
        },
        r.psi_z, M_PI / 2, opt);
    double sz = std::sin(r.psi_z);
    double f_at_z = std::sqrt(1.0 - r.m * sz * sz);
    double cbar = std::sqrt(r.n);
    double dcbar = 1.0 / (2.0 * cbar * C * C);
    double dz = -sz / cbar * dcbar;
    double cz = std::cos(r.psi_z);
    if (std::fabs(cz) < 1e-12) throw DomainError("calB_C: derivative singular at theta*");
    double dpsi_z = dz / cz;
    double rbar2 = 1.0 - 1.0 / (par.R * par.R);
    double dm = rbar2 / (C * C);
    double dpref = -par.R / (2.0 * C * std::sqrt(C));
    return dpref * JB + r.pref * (-f_at_z * dpsi_z + dJ_dm * dm);
}

inline int branch_sign(const Params& par, const State& s) {
    auto inv = geo_invariants(par, s);
    double st = (s.qdot[0] >= 0) ? 1.0 : -1.0;
    double sl = (inv.L >= 0) ? 1.0 : -1.0;
    return static_cast<int>(st * sl);
}

/// Theta = phi - s calA(theta; C), the azimuth of the theta-minimum.
inline double geo_Theta(const Params& par, const State& s) {
    auto inv = geo_invariants(par, s);
    return s.q[1] - branch_sign(par, s) * calA(par, s.q[0], inv.C);
}

/// T = t - s L^-1 calB(theta; C), the affine time of the theta-minimum.
inline double geo_T(const Params& par, const State& s) {
    auto inv = geo_invariants(par, s);
    return s.t - branch_sign(par, s) / inv.L * calB(par, s.q[0], inv.C);
}

inline ScalarField field_L(const Params&) {
    return ScalarField{[](const State& s) {
                           double sn = std::sin(s.q[0]);
                           return sn * sn * s.qdot[1];
                       },
                       FieldKind::constant_of_motion, "L"};
}

inline ScalarField field_E(const Params& par) {
    return ScalarField{[par](const State& s) {
                           double sn = std::sin(s.q[0]);
                           return 0.5 * (sn * sn * s.qdot[1] * s.qdot[1] +
                                         g_theta(par, s.q[0]) * s.qdot[0] * s.qdot[0]);
                       },
                       FieldKind::constant_of_motion, "E"};
}

inline ScalarField field_Theta(const Params& par) {
    return ScalarField{[par](const State& s) { return geo_Theta(par, s); },
                       FieldKind::local_integral, "Theta"};
}

inline ScalarField field_T(const Params& par) {
    return ScalarField{[par](const State& s) { return geo_T(par, s); },
                       FieldKind::local_integral, "T"};
}

/// Analytic characteristics of the dynamical symmetries (Noether fields of
/// Theta and T).
inline SymmetryField x_of_Theta(const Params& par) {
    return SymmetryField{[par](const State& s) {
                             auto inv = geo_invariants(par, s);
                             int sb = branch_sign(par, s);
                             double ac = calA_C(par, s.q[0], inv.C);
                             double csc2 = 1.0 / (std::sin(s.q[0]) * std::sin(s.q[0]));
                             double p_th = -2.0 * sb * ac * s.qdot[0] / (inv.L * inv.L);
                             double p_ph = 2.0 * sb * ac * (inv.C - csc2) / inv.L;
                             return Vec{p_th, p_ph};
                         },
                         nullptr, "X(Theta)"};
}

inline SymmetryField x_of_T(const Params& par) {
    return SymmetryField{[par](const State& s) {
                             auto inv = geo_invariants(par, s);
                             int sb = branch_sign(par, s);
                             double bc = calB_C(par, s.q[0], inv.C);
                             double b = calB(par, s.q[0], inv.C);
                             double csc2 = 1.0 / (std::sin(s.q[0]) * std::sin(s.q[0]));
                             double L = inv.L;
                             double p_th = -2.0 * sb * bc * s.qdot[0] / (L * L * L);
                             double p_ph = sb * (b + 2.0 * bc * (inv.C - csc2)) / (L * L);
                             return Vec{p_th, p_ph};
                         },
                         nullptr, "X(T)"};
}

inline SymmetryField x_of_L(const Params&) {
    return SymmetryField{[](const State&) { return Vec{0.0, 1.0}; }, nullptr, "X(L)"};
}

inline SymmetryField x_of_E(const Params&) {
    return SymmetryField{[](const State& s) { return Vec{s.qdot[0], s.qdot[1]}; }, nullptr,
                         "X(E)"};
}

struct Periods {
    double dphi_closed, dphi_quad;
    double dT_closed, dT_quad;     // 4 x calB quarter-integral (scaled period L*dT_affine)
    double dT_displayed;           // as printed in the source table; differs by R^2
};

inline Periods geo_periods(const Params& par, double C) {
    if (C <= 1.0) throw DomainError("geo_periods: need C > 1");
    double n = 1.0 - 1.0 / C;
    double rbar2 = 1.0 - 1.0 / (par.R * par.R);
    double m = n * rbar2;
    double R = par.R;
    Periods p;
    p.dphi_closed =
        4.0 / (R * std::sqrt(C)) * ((R * R - 1.0) * comp_k_m(m) + comp_pi_m(n, m));
    p.dphi_quad = 4.0 * calA_quad(par, M_PI / 2, C);
    p.dT_quad = 4.0 * calB_quad(par, M_PI / 2, C);
    p.dT_closed = 4.0 * R / std::sqrt(C) * comp_e_m(m);
    p.dT_displayed = 4.0 / (R * std::sqrt(C)) * comp_e_m(m);
    return p;
}

namespace detail {

/// Rebuild velocities from (L, E) at fixed theta and carried branch signs.
inline State rebuild(const Params& par, double t, double theta, double phi, double L, double E,
                     int sgn_thdot) {
    double sn = std::sin(theta);
    double rad = 2.0 * E - L * L / (sn * sn);
    if (rad < 0) throw DomainError("spheroid group: state outside turning range");
    State out;
    out.t = t;
    out.q = Vec{theta, phi};
    out.qdot = Vec{sgn_thdot * std::sqrt(rad / g_theta(par, theta)), L / (sn * sn)};
    return out;
}

}  // namespace detail

/// Dynamical transformation generated by Theta: L -> L - eps at fixed E.
inline State geo_dyn_Theta(const Params& par, const State& s, double eps) {
    if (eps == 0.0) return s;
    auto inv = geo_invariants(par, s);
    double Ld = inv.L - eps;
    if (std::fabs(Ld) < 1e-9 * std::max(1.0, std::fabs(inv.L)))
        throw DomainError("geo_dyn_Theta: L-dagger = 0");
    double Cd = 2.0 * inv.E / (Ld * Ld);
    if (Cd <= 1.0) throw DomainError("geo_dyn_Theta: C-dagger <= 1");
    double sn = std::sin(s.q[0]);
    if (Cd * sn * sn < 1.0) throw DomainError("geo_dyn_Theta: theta outside transformed range");
    int sb = branch_sign(par, s);
    int st = (s.qdot[0] >= 0) ? 1 : -1;
    double phid = s.q[1] + sb * (calA(par, s.q[0], Cd) - calA(par, s.q[0], inv.C));
    double td = s.t + st / std::sqrt(2.0 * inv.E) *
                          (std::sqrt(Cd) * calB(par, s.q[0], Cd) -
                           std::sqrt(inv.C) * calB(par, s.q[0], inv.C));
    return detail::rebuild(par, td, s.q[0], phid, Ld, inv.E, st);
}

/// Dynamical transformation generated by T: E -> E + eps at fixed L.
inline State geo_dyn_T(const Params& par, const State& s, double eps) {
    if (eps == 0.0) return s;
    auto inv = geo_invariants(par, s);
    double Ed = inv.E + eps;
    double Cd = 2.0 * Ed / (inv.L * inv.L);
    if (Cd <= 1.0) throw DomainError("geo_dyn_T: C-dagger <= 1");
    double sn = std::sin(s.q[0]);
    if (Cd * sn * sn < 1.0) throw DomainError("geo_dyn_T: theta outside transformed range");
    int sb = branch_sign(par, s);
    int st = (s.qdot[0] >= 0) ? 1 : -1;
    double phid = s.q[1] + sb * (calA(par, s.q[0], Cd) - calA(par, s.q[0], inv.C));
    double td = s.t + sb / inv.L * (calB(par, s.q[0], Cd) - calB(par, s.q[0], inv.C));
    return detail::rebuild(par, td, s.q[0], phid, inv.L, Ed, st);
}

inline std::vector<EventSpec> geo_events() {
    return {{"turning", [](const State& s) { return s.qdot[0]; }, EventSpec::Direction::any}};
}

}  // namespace noether::spheroid
