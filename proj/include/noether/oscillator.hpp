#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>

#include "noether/framework.hpp"
#include "noether/ode.hpp"
#include "noether/quadrature.hpp"
#include "noether/rootfind.hpp"

namespace noether::oscillator {

/// Nonlinear oscillator qddot + omega(t)^2 q + beta q^-3 = 0, beta^2 = 1,
/// with the companion linear oscillator sigma'' + omega^2 sigma = 0.

struct Params {
    double beta = -1.0;
    std::function<double(double)> omega;           // smooth, positive
    double t0 = 0.0;
    double sigma0 = 0.0, dsigma0 = 1.0;            // sigma(t0), sigma'(t0)
    double calB_const = 0.0;                       // B(t0)
    bool omega_is_const = true;
    double omega_value = 1.0;

    static Params const_omega(double beta, double w, double t0 = 0.0, double sigma0 = 0.0,
                              double dsigma0 = 1.0) {
        Params p;
        p.beta = beta;
        p.omega_is_const = true;
        p.omega_value = w;
        p.omega = [w](double) { return w; };
        p.t0 = t0;
        p.sigma0 = sigma0;
        p.dsigma0 = dsigma0;
        return p;
    }
    static Params profile(double beta, std::function<double(double)> w, double t0,
                          double sigma0, double dsigma0) {
        Params p;
        p.beta = beta;
        p.omega_is_const = false;
        p.omega = std::move(w);
        p.t0 = t0;
        p.sigma0 = sigma0;
        p.dsigma0 = dsigma0;
        return p;
    }
};

struct SigmaVal {
    double s, ds, B;  // sigma, sigma', B = int sigma^-2 dt
};

/// Provides sigma and sigma' everywhere, and the accumulated B(t) within the
/// sigma-nonzero window (B diverges at sigma zeros, so it is per-window).
struct SigmaProvider {
    std::function<std::pair<double, double>(double)> sd;      // (sigma, sigma')
    std::function<double(double)> B;                          // valid within one window
    std::function<std::pair<double, double>(double)> window;  // surrounding sigma != 0 interval

    SigmaVal eval(double t) const {
        auto [s, ds] = sd(t);
        return SigmaVal{s, ds, B(t)};
    }
};

/// Closed-form provider for constant omega: sigma = rho sin(w(t-ts)),
/// B = -cot(w(t-ts))/(w rho^2) + const.
inline SigmaProvider make_sigma_const(double w, double t0, double sigma0, double dsigma0,
                                      double calB_const) {
    double rho = std::hypot(sigma0, dsigma0 / w);
    double phi0 = std::atan2(sigma0 * w, dsigma0);  // sigma = rho sin(w(t-t0)+phi0)
    double ts = t0 - phi0 / w;
    auto phase = [w, ts](double t) { return w * (t - ts); };
    // B anchored where sigma' = 0 (window midpoint); the constant cancels in
    // every Upsilon difference taken within one window
    SigmaProvider p;
    p.sd = [=](double t) {
        double ph = phase(t);
        return std::make_pair(rho * std::sin(ph), rho * w * std::cos(ph));
    };
    p.B = [=](double t) {
        double ph = phase(t);
        return -std::cos(ph) / std::sin(ph) / (w * rho * rho) + calB_const;
    };
    p.window = [=](double t) {
        double ph = phase(t);
        double k = std::floor(ph / M_PI);
        return std::make_pair(ts + k * M_PI / w, ts + (k + 1) * M_PI / w);
    };
    return p;
}

/// Dense-output provider for arbitrary smooth omega(t): co-integrates the
/// companion equation over [t0 - span, t0 + span]; B by adaptive quadrature
/// of sigma^-2 against the dense solution.
inline SigmaProvider make_sigma_integrated(std::function<double(double)> omega, double t0,
                                           double sigma0, double dsigma0, double calB_const,
                                           double span) {
    SystemDef lin;
    lin.n_dof = 1;
    lin.name = "sigma";
    lin.force = [omega](const State& s) {
        double w = omega(s.t);
        return Vec{-w * w * s.q[0]};
    };
    lin.lagrangian = [omega](const State& s) {
        double w = omega(s.t);
        return 0.5 * (s.qdot[0] * s.qdot[0] - w * w * s.q[0] * s.q[0]);
    };
    lin.hessian_fn = [](const State&) { return Mat::identity(1); };
    lin.mixed_fn = [](const State&) { return Mat(1); };

    State init(t0, Vec{sigma0}, Vec{dsigma0});
    IntegrateOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    auto fwd = std::make_shared<Trajectory>(integrate(lin, init, t0 + span, opt));
    auto bwd = std::make_shared<Trajectory>(integrate(lin, init, t0 - span, opt));

    auto raw = [fwd, bwd, t0](double t) {
        const Trajectory& tr = (t >= t0) ? *fwd : *bwd;
        State s = tr.state(t);
        return std::make_pair(s.q[0], s.qdot[0]);
    };
    // window scan: march outward from a point of definite sigma sign
    auto window_of = [raw, t0, span](double t) {
        auto sig = [&raw](double x) { return raw(x).first; };
        double step = span / 512.0;
        double c = t;
        if (sig(c) == 0.0) c += 1e-3 * step;
        double lo = t0 - span, hi = t0 + span;
        double x = c;
        while (x + step <= t0 + span && sig(x) * sig(x + step) > 0) x += step;
        if (x + step <= t0 + span) hi = find_root(sig, x, x + step, 1e-13);
        x = c;
        while (x - step >= t0 - span && sig(x) * sig(x - step) > 0) x -= step;
        if (x - step >= t0 - span) lo = find_root(sig, x - step, x, 1e-13);
        return std::make_pair(lo, hi);
    };
    // anchor B where |sigma| peaks in the window around t0 (constant cancels
    // in Upsilon differences; an anchor at a sigma zero would diverge)
    double tB;
    {
        auto [lo, hi] = window_of(t0);
        tB = 0.5 * (lo + hi);
        double best = 0.0;
        const int n_scan = 400;
        for (int i = 1; i < n_scan; ++i) {
            double xx = lo + (hi - lo) * i / n_scan;
            double v = std::fabs(raw(xx).first);
            if (v > best) {
                best = v;
                tB = xx;
            }
        }
    }
    SigmaProvider p;
    p.sd = raw;
    p.B = [raw, tB, calB_const](double t) {
        QuadOptions q;
        q.abs_tol = 1e-13;
        q.rel_tol = 1e-13;
        return calB_const + integrate_adaptive(
                                [&raw](double x) {
                                    double sv = raw(x).first;
                                    return 1.0 / (sv * sv);
                                },
                                tB, t, q);
    };
    p.window = window_of;
    return p;
}

class OscSystem {
public:
    explicit OscSystem(Params par, double sigma_span = 60.0) : par_(std::move(par)) {
        if (par_.omega_is_const)
            provider_ = make_sigma_const(par_.omega_value, par_.t0, par_.sigma0, par_.dsigma0,
                                         par_.calB_const);
        else
            provider_ = make_sigma_integrated(par_.omega, par_.t0, par_.sigma0, par_.dsigma0,
                                              par_.calB_const, sigma_span);
        sys_.n_dof = 1;
        sys_.name = "oscillator";
        double beta = par_.beta;
        auto omega = par_.omega;
        sys_.force = [beta, omega](const State& s) {
            if (s.q[0] == 0.0) throw Singularity("oscillator: q = 0");
            double w = omega(s.t);
            return Vec{-w * w * s.q[0] - beta / (s.q[0] * s.q[0] * s.q[0])};
        };
        sys_.lagrangian = [beta, omega](const State& s) {
            double w = omega(s.t);
            return 0.5 * (s.qdot[0] * s.qdot[0] - w * w * s.q[0] * s.q[0] +
                          beta / (s.q[0] * s.q[0]));
        };
        sys_.hessian_fn = [](const State&) { return Mat::identity(1); };
        sys_.mixed_fn = [](const State&) { return Mat(1); };
        // aux = (sigma, sigma') co-integrated with the trajectory
        sys_.n_aux = 2;
        sys_.aux_rhs = [omega](const State& s) {
            double w = omega(s.t);
            return Vec{s.aux[1], -w * w * s.aux[0]};
        };
    }

    const Params& params() const { return par_; }
    const SystemDef& sys() const { return sys_; }
    SystemDef& sys() { return sys_; }
    const SigmaProvider& sigma_provider() const { return provider_; }
    SigmaVal sigma(double t) const { return provider_.eval(t); }
    std::pair<double, double> sigma_sd(double t) const { return provider_.sd(t); }

    /// initial state with the sigma channel attached
    State make_state(double t, double q, double qdot) const {
        auto [sv, dsv] = sigma_sd(t);
        State s(t, Vec{q}, Vec{qdot});
        s.aux = Vec{sv, dsv};
        return s;
    }

private:
    Params par_;
    SystemDef sys_;
    SigmaProvider provider_;
};

inline Vec osc_rhs(const Params& par, const State& s) {
    if (s.q[0] == 0.0) throw Singularity("oscillator: q = 0");
    double w = par.omega(s.t);
    return Vec{-w * w * s.q[0] - par.beta / (s.q[0] * s.q[0] * s.q[0])};
}

/// C = ((sigma qdot - sigma' q)^2 - beta sigma^2 / q^2) / 2
inline double osc_C(const OscSystem& osys, const State& s) {
    if (s.q[0] == 0.0) throw Singularity("osc_C: q = 0");
    auto [sg, dsg] = osys.sigma_sd(s.t);
    double u = sg * s.qdot[0] - dsg * s.q[0];
    return 0.5 * (u * u - osys.params().beta * sg * sg / (s.q[0] * s.q[0]));
}

inline ScalarField field_C(const OscSystem& osys) {
    return ScalarField{[&osys](const State& s) { return osc_C(osys, s); },
                       FieldKind::constant_of_motion, "C"};
}

/// energy function E = qdot^2/2 + omega^2 q^2/2 - beta q^-2/2
inline ScalarField field_E(const OscSystem& osys) {
    return ScalarField{[&osys](const State& s) {
                           double w = osys.params().omega(s.t);
                           return 0.5 * (s.qdot[0] * s.qdot[0] + w * w * s.q[0] * s.q[0] -
                                         osys.params().beta / (s.q[0] * s.q[0]));
                       },
                       FieldKind::constant_of_motion, "E"};
}

/// analytic point-symmetry characteristic P = dC/dqdot = sigma (sigma qdot - sigma' q)
inline SymmetryField x_of_C(const OscSystem& osys) {
    return SymmetryField{[&osys](const State& s) {
                             auto [sg, dsg] = osys.sigma_sd(s.t);
                             return Vec{sg * (sg * s.qdot[0] - dsg * s.q[0])};
                         },
                         nullptr, "X(C)"};
}

/// qdot = (sigma' q +/- sqrt(2C + beta sigma^2/q^2)) / sigma
inline double osc_qdot_from_C(const OscSystem& osys, double t, double q, double C, int sign) {
    auto [sg, dsg] = osys.sigma_sd(t);
    double rad = 2.0 * C + osys.params().beta * sg * sg / (q * q);
    if (rad < 0) throw DomainError("osc_qdot_from_C: outside classically allowed region");
    return (dsg * q + sign * std::sqrt(rad)) / sg;
}

enum class SpecialKind { turning_outer, turning_inner, inertial };

struct SpecialPoint {
    SpecialKind kind;
    double abs_q;
};

/// Turning radii (roots of qdot = 0 at fixed t) and, for beta = -1, the
/// inertial radius |q*| = omega^-1/2.
inline std::vector<SpecialPoint> osc_special_points(const OscSystem& osys, double t, double C) {
    const double beta = osys.params().beta;
    auto [sg, dsg] = osys.sigma_sd(t);
    std::vector<SpecialPoint> out;
    double ss = sg * dsg;
    double disc = C * C + beta * ss * ss;
    if (std::fabs(dsg) < 1e-10 * std::max(1.0, std::fabs(sg)))
        throw NotApplicable("osc_special_points: sigma' = 0, turning radii degenerate");
    if (disc >= 0) {
        double root = std::sqrt(disc);
        double outer = (C + root) / (dsg * dsg);
        if (outer > 0) out.push_back({SpecialKind::turning_outer, std::sqrt(outer)});
        if (beta == -1.0) {
            double inner = (C - root) / (dsg * dsg);
            if (inner > 0) out.push_back({SpecialKind::turning_inner, std::sqrt(inner)});
        }
    }
    if (beta == -1.0) {
        double w = osys.params().omega(t);
        out.push_back({SpecialKind::inertial, 1.0 / std::sqrt(w)});
    }
    return out;
}

enum class UpsCase { tp_beta_plus, tp_beta_minus_outer, tp_beta_minus_inner, ip };

/// Branch bookkeeping for the locally conserved Upsilon: the sign of the
/// square-root branch, the anchor case, and the anchoring event state.
struct OscBranchState {
    int sgn_rhs = 1;       // sign of sigma qdot - sigma' q at the anchor
    UpsCase ucase = UpsCase::tp_beta_minus_outer;
    double calB_const = 0.0;
    State anchor;          // event state (turning or inertial point)
};

/// Smooth globally conserved core: B(t) - u q / (2 C sigma), u = sigma qdot - sigma' q.
inline double osc_upsilon_global(const OscSystem& osys, const State& s) {
    SigmaVal sv = osys.sigma(s.t);
    double u = sv.s * s.qdot[0] - sv.ds * s.q[0];
    double C = osc_C(osys, s);
    return sv.B - u * s.q[0] / (2.0 * C * sv.s);
}

inline ScalarField field_upsilon_global(const OscSystem& osys) {
    return ScalarField{[&osys](const State& s) { return osc_upsilon_global(osys, s); },
                       FieldKind::temporal_integral, "Upsilon"};
}

/// Anchor offset Theta(T; C): value of the indefinite angle integral at the
/// anchor point, as a function of the conserved C.  This is where the three
/// displayed branch formulas live; all anchor-side factors are evaluated at
/// the event time T.
inline double osc_anchor_theta(const OscSystem& osys, const OscBranchState& br, double C) {
    const double beta = osys.params().beta;
    auto [sT, dsT] = osys.sigma_sd(br.anchor.t);
    switch (br.ucase) {
        case UpsCase::tp_beta_plus:
        case UpsCase::tp_beta_minus_outer:
        case UpsCase::tp_beta_minus_inner: {
            if (dsT == 0.0) throw NotApplicable("upsilon anchor: sigma'(T) = 0");
            // A^2 = 1 + beta (sigma sigma')^2 / C^2 so that |C| A is the
            // turning-radius discriminant sqrt(C^2 + beta sigma^2 sigma'^2)
            double a2 = 1.0 + beta * sT * sT * dsT * dsT / (C * C);
            if (a2 < 0) throw DomainError("upsilon anchor: A not real");
            double A = std::sqrt(a2);
            double pm = (br.ucase == UpsCase::tp_beta_minus_inner) ? -1.0 : 1.0;
            double sgnC = (C >= 0) ? 1.0 : -1.0;
            return -(1.0 + pm * sgnC * A) / (2.0 * sT * dsT);
        }
        case UpsCase::ip: {
            double w = osys.params().omega(br.anchor.t);
            double rad = 2.0 * C / w - sT * sT;
            if (rad < 0) throw DomainError("upsilon anchor: inertial radical negative");
            return br.sgn_rhs * std::sqrt(rad) / (2.0 * C * sT);
        }
    }
    throw DomainError("upsilon anchor: bad case");
}

/// Classify an event state into a branch record.  `kind` distinguishes the
/// turning-point pair from the inertial anchor.
inline OscBranchState make_branch(const OscSystem& osys, const State& anchor, bool inertial) {
    OscBranchState br;
    br.anchor = anchor;
    auto [sgv, dsgv] = osys.sigma_sd(anchor.t);
    SigmaVal sv{sgv, dsgv, 0.0};
    double u = sv.s * anchor.qdot[0] - sv.ds * anchor.q[0];
    br.sgn_rhs = (u >= 0) ? 1 : -1;
    double C = osc_C(osys, anchor);
    if (inertial) {
        br.ucase = UpsCase::ip;
        return br;
    }
    if (osys.params().beta > 0) {
        br.ucase = UpsCase::tp_beta_plus;
        return br;
    }
    // beta = -1: decide outer vs inner from the turning radii at the event
    double ss = sv.s * sv.ds;
    double disc = C * C - ss * ss;
    double q2 = anchor.q[0] * anchor.q[0];
    if (disc >= 0 && sv.ds != 0.0) {
        double outer = (C + std::sqrt(disc)) / (sv.ds * sv.ds);
        double inner = (C - std::sqrt(disc)) / (sv.ds * sv.ds);
        br.ucase = (std::fabs(q2 - outer) <= std::fabs(q2 - inner))
                       ? UpsCase::tp_beta_minus_outer
                       : UpsCase::tp_beta_minus_inner;
    } else {
        br.ucase = UpsCase::tp_beta_minus_outer;
    }
    return br;
}

/// Locally conserved integral Upsilon = B(T): piecewise constant between
/// events, equal to the accumulated B at the anchor event of the current arc.
inline double osc_upsilon(const OscSystem& osys, const State& s, const OscBranchState& br) {
    double C = osc_C(osys, s);
    return osc_upsilon_global(osys, s) + osc_anchor_theta(osys, br, C);
}

/// Explicit solution through the invariants: given C and the global Upsilon
/// value, returns (q, qdot) at time t.  sgn_q picks the q > 0 or q < 0 branch.
inline std::pair<double, double> osc_explicit_solution(const OscSystem& osys, double C,
                                                       double ups_global, double t,
                                                       int sgn_q = 1) {
    SigmaVal sv = osys.sigma(t);
    double W = 2.0 * C * sv.s * (sv.B - ups_global);
    double q2 = (W * W - osys.params().beta * sv.s * sv.s) / (2.0 * C);
    if (q2 <= 0) throw DomainError("osc_explicit_solution: q^2 <= 0");
    double q = sgn_q * std::sqrt(q2);
    double qdot = (sv.ds * q + W / q) / sv.s;
    return {q, qdot};
}

/// Explicit point-symmetry group on (q, qdot) at fixed t: exact integral
/// curves of the scaling flow generated by C's symmetry.  C is invariant.
inline State osc_point_group(const OscSystem& osys, const State& s, double eps) {
    if (eps == 0.0) return s;
    const double beta = osys.params().beta;
    auto [sgv, dsgv] = osys.sigma_sd(s.t);
    SigmaVal sv{sgv, dsgv, 0.0};
    double q = s.q[0];
    double u = sv.s * s.qdot[0] - sv.ds * q;
    double C = osc_C(osys, s);
    double rad0 = 2.0 * C * q * q + beta * sv.s * sv.s;
    if (rad0 < 0) throw DomainError("osc_point_group: negative radicand at start");
    double G0 = std::sqrt(rad0);  // = |u q|
    double su = (u >= 0) ? 1.0 : -1.0;
    // exact flow: G(eps) = G0 - 2 C su |sigma| eps (signed continuation),
    // q^2(eps) = (G^2 - beta sigma^2) / (2C)
    double G = G0 - 2.0 * C * su * std::fabs(sv.s) * eps;
    double q2 = (G * G - beta * sv.s * sv.s) / (2.0 * C);
    if (q2 <= 0) throw DomainError("osc_point_group: transformation leaves admissible region");
    double qd = ((q >= 0) ? 1.0 : -1.0) * std::sqrt(q2);
    double udag = su * G / std::sqrt(q2);
    State out = s;
    out.q[0] = qd;
    out.qdot[0] = (sv.ds * qd + udag) / sv.s;
    return out;
}

enum class CAction { scale, shift };  // C -> (1-eps) C  versus  C -> C - eps

/// Dynamical symmetry group: moves along the solution family at fixed anchor
/// event time T, rescaling C and reparametrizing t by the sigma inversion
/// sigma(t-dagger) = (1 - eps) sigma(t).
inline State osc_dyn_group(const OscSystem& osys, const State& s, double eps,
                           const OscBranchState& br, CAction mode = CAction::scale) {
    if (eps >= 1.0) throw DomainError("osc_dyn_group: eps must be < 1");
    SigmaVal sv = osys.sigma(s.t);
    double C = osc_C(osys, s);
    double Cdag = (mode == CAction::scale) ? (1.0 - eps) * C : C - eps;

    // invert sigma on the branch window, continuous from t
    double target = (1.0 - eps) * sv.s;
    auto [wlo, whi] = osys.sigma_provider().window(s.t);
    auto g = [&](double x) { return osys.sigma(x).s - target; };
    double tdag = s.t;
    if (eps != 0.0) {
        double step = (whi - wlo) / 256.0;
        double a = s.t, b = s.t;
        bool found = false;
        for (int i = 0; i < 256 && !found; ++i) {
            double lo = std::max(wlo + 1e-9 * (whi - wlo), s.t - (i + 1) * step);
            double hi = std::min(whi - 1e-9 * (whi - wlo), s.t + (i + 1) * step);
            if (g(lo) * g(s.t) <= 0) {
                a = lo; b = s.t; found = true;
            } else if (g(s.t) * g(hi) <= 0) {
                a = s.t; b = hi; found = true;
            }
        }
        if (!found) throw DomainError("osc_dyn_group: sigma inversion leaves the branch window");
        tdag = find_root(g, a, b, 1e-14);
    }

    SigmaVal svd = osys.sigma(tdag);
    double u = sv.s * s.qdot[0] - sv.ds * s.q[0];
    double W = u * s.q[0];
    double dTheta = osc_anchor_theta(osys, br, Cdag) - osc_anchor_theta(osys, br, C);
    double Wdag = 2.0 * Cdag * svd.s * (svd.B - sv.B + dTheta + W / (2.0 * C * sv.s));
    double q2 = (Wdag * Wdag - osys.params().beta * svd.s * svd.s) / (2.0 * Cdag);
    if (q2 <= 0) throw DomainError("osc_dyn_group: transformed q^2 <= 0");
    double qdag = ((s.q[0] >= 0) ? 1.0 : -1.0) * std::sqrt(q2);
    double qddag = (svd.ds * qdag + Wdag / qdag) / svd.s;
    State out;
    out.t = tdag;
    out.q = Vec{qdag};
    out.qdot = Vec{qddag};
    out.aux = Vec{svd.s, svd.ds};
    return out;
}

/// Events: turning points (qdot = 0), inertial points (force = 0), branch
/// sign flips (u = 0) and the sigma-window markers.
inline std::vector<EventSpec> osc_events(const OscSystem& osys) {
    std::vector<EventSpec> ev;
    ev.push_back({"turning", [](const State& s) { return s.qdot[0]; }, EventSpec::Direction::any});
    const double beta = osys.params().beta;
    auto omega = osys.params().omega;
    ev.push_back({"inertial",
                  [beta, omega](const State& s) {
                      double w = omega(s.t);
                      return -w * w * s.q[0] - beta / (s.q[0] * s.q[0] * s.q[0]);
                  },
                  EventSpec::Direction::any});
    ev.push_back({"branch",
                  [](const State& s) { return s.aux[0] * s.qdot[0] - s.aux[1] * s.q[0]; },
                  EventSpec::Direction::any});
    ev.push_back({"sigma_zero", [](const State& s) { return s.aux[0]; }, EventSpec::Direction::any});
    ev.push_back(
        {"sigma_prime_zero", [](const State& s) { return s.aux[1]; }, EventSpec::Direction::any});
    return ev;
}

}  // namespace noether::oscillator
