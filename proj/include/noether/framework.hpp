#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "noether/diff.hpp"
#include "noether/quadrature.hpp"
#include "noether/state.hpp"

namespace noether {

/// Hessian g_ij = d2L/dqdot^i dqdot^j, symmetrized.  Uses the system's
/// analytic callback when registered, nested central differences otherwise.
inline Mat hessian(const SystemDef& sys, const State& s) {
    const std::size_t n = sys.n_dof;
    Mat g(n);
    if (sys.hessian_fn) {
        g = sys.hessian_fn(s);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double v = partial2(sys.lagrangian, s, detail::Slot::vel, i, detail::Slot::vel,
                                    j, sys.diff);
                g(i, j) = v;
                g(j, i) = v;
            }
    }
    double d = g.det();
    if (!std::isfinite(d) || std::fabs(d) < sys.hessian_det_tol)
        throw SingularHessian(sys.name + ": degenerate Lagrangian (|det g| below tolerance)");
    return g;
}

/// Mixed matrix h_ij = d2L/dq^i dqdot^j (row = position index).
inline Mat mixed_matrix(const SystemDef& sys, const State& s) {
    const std::size_t n = sys.n_dof;
    if (sys.mixed_fn) return sys.mixed_fn(s);
    Mat h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = partial2(sys.lagrangian, s, detail::Slot::pos, i, detail::Slot::vel, j,
                               sys.diff);
    return h;
}

/// c^{ij} = g^{-1}(h - h^T)g^{-1}, the velocity-velocity block of the
/// symplectic matrix in Lagrangian variables.
inline Mat c_matrix(const SystemDef& sys, const State& s) {
    Mat g = hessian(sys, s);
    Mat ginv = g.inverse();
    Mat h = mixed_matrix(sys, s);
    Mat skew(sys.n_dof);
    for (std::size_t i = 0; i < sys.n_dof; ++i)
        for (std::size_t j = 0; j < sys.n_dof; ++j) skew(i, j) = h(i, j) - h(j, i);
    return ginv.mul(skew).mul(ginv);
}

/// Euler-Lagrange residual d/dt(dL/dqdot_i) - dL/dq_i with qddot substituted
/// from the force law; vanishes when force and Lagrangian are consistent.
inline Vec euler_lagrange_residual(const SystemDef& sys, const State& s) {
    const std::size_t n = sys.n_dof;
    Vec f = sys.force(s);
    Mat g = hessian(sys, s);
    Mat h = mixed_matrix(sys, s);
    Vec res = g.mul(f);
    for (std::size_t i = 0; i < n; ++i) {
        res[i] += partial2(sys.lagrangian, s, detail::Slot::time, 0, detail::Slot::vel, i, sys.diff);
        for (std::size_t j = 0; j < n; ++j) res[i] += h(j, i) * s.qdot[j];
        res[i] -= partial_q(sys.lagrangian, s, i, sys.diff);
    }
    return res;
}

/// Energy function E = qdot^i dL/dqdot^i - L as a scalar field.
inline ScalarField energy_function(const SystemDef& sys) {
    ScalarField f;
    f.name = "energy";
    f.kind = FieldKind::constant_of_motion;
    f.eval = [&sys](const State& s) {
        double e = -sys.lagrangian(s);
        for (std::size_t i = 0; i < sys.n_dof; ++i)
            e += s.qdot[i] * partial_qdot(sys.lagrangian, s, i, sys.diff);
        return e;
    };
    return f;
}

/// Poisson bracket in Lagrangian variables,
///   {F1,F2} = g^{-1ij}(dF1/dq^i dF2/dqdot^j - dF2/dq^i dF1/dqdot^j)
///           + c^{ij} dF1/dqdot^i dF2/dqdot^j.
inline double poisson_bracket(const SystemDef& sys, const ScalarField& f1, const ScalarField& f2,
                              const State& s) {
    const std::size_t n = sys.n_dof;
    Mat ginv = hessian(sys, s).inverse();
    Vec g1 = grad_phase(f1.eval, s, sys.diff);
    Vec g2 = grad_phase(f2.eval, s, sys.diff);
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            val += ginv(i, j) * (g1[i] * g2[n + j] - g2[i] * g1[n + j]);
    Mat h = mixed_matrix(sys, s);
    bool skew_zero = true;
    for (std::size_t i = 0; i < n && skew_zero; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (h(i, j) != h(j, i)) {
                skew_zero = false;
                break;
            }
    if (!skew_zero) {
        Mat c(n);
        Mat skew(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) skew(i, j) = h(i, j) - h(j, i);
        c = ginv.mul(skew).mul(ginv);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) val += c(i, j) * g1[n + i] * g2[n + j];
    }
    return val;
}

/// Noether map C -> X: characteristic P^i = g^{-1ij} dC/dqdot^j.
inline SymmetryField symmetry_from_integral(const SystemDef& sys, const ScalarField& c) {
    SymmetryField x;
    x.name = "X(" + c.name + ")";
    auto eval = c.eval;
    auto diff = sys.diff;
    x.p = [&sys, eval, diff](const State& s) {
        const std::size_t n = sys.n_dof;
        Vec dc(n);
        for (std::size_t i = 0; i < n; ++i) dc[i] = partial_qdot(eval, s, i, diff);
        return hessian(sys, s).solve(dc);
    };
    return x;
}

/// Time derivative restricted to the solution space applied to a scalar:
/// D_t F = dF/dt + qdot^i dF/dq^i + f^i dF/dqdot^i.
template <class F>
double restricted_dt(const SystemDef& sys, const F& fn, const State& s) {
    double v = partial_t(fn, s, sys.diff);
    Vec f = sys.force(s);
    for (std::size_t i = 0; i < sys.n_dof; ++i) {
        v += s.qdot[i] * partial_q(fn, s, i, sys.diff);
        v += f[i] * partial_qdot(fn, s, i, sys.diff);
    }
    return v;
}

/// Prolongation of a symmetry characteristic: returns (P, D_t P).  The
/// components of P usually come out of other differenced computations, so the
/// derivatives here use the wider field step to stay above their noise floor.
inline std::pair<Vec, Vec> prolong(const SystemDef& sys, const SymmetryField& x, const State& s) {
    const std::size_t n = sys.n_dof;
    const DiffScheme d = sys.diff.widened();
    Vec p = x.p(s);
    Vec f = sys.force(s);
    Vec dtp(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto comp = [&x, i](const State& u) { return x.p(u)[i]; };
        double v = partial_t(comp, s, d);
        for (std::size_t j = 0; j < n; ++j) {
            v += s.qdot[j] * partial_q(comp, s, j, d);
            v += f[j] * partial_qdot(comp, s, j, d);
        }
        dtp[i] = v;
    }
    return {p, dtp};
}

/// Symmetry action X^E(C) = P^i dC/dq^i + (D_t P^i) dC/dqdot^i.
inline double symmetry_action(const SystemDef& sys, const SymmetryField& x, const ScalarField& c,
                              const State& s) {
    auto [p, dtp] = prolong(sys, x, s);
    double v = 0.0;
    for (std::size_t i = 0; i < sys.n_dof; ++i) {
        v += p[i] * partial_q(c.eval, s, i, sys.diff);
        v += dtp[i] * partial_qdot(c.eval, s, i, sys.diff);
    }
    return v;
}

/// Characteristic of the commutator [Xa^E, Xb^E]: Xa(P_b) - Xb(P_a), the
/// directional derivatives taken along the prolonged fields.
inline Vec commutator(const SystemDef& sys, const SymmetryField& xa, const SymmetryField& xb,
                      const State& s) {
    const std::size_t n = sys.n_dof;
    const DiffScheme d = sys.diff.widened();
    auto [pa, dtpa] = prolong(sys, xa, s);
    auto [pb, dtpb] = prolong(sys, xb, s);
    Vec out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        auto comp_b = [&xb, j](const State& u) { return xb.p(u)[j]; };
        auto comp_a = [&xa, j](const State& u) { return xa.p(u)[j]; };
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v += pa[i] * partial_q(comp_b, s, i, d) + dtpa[i] * partial_qdot(comp_b, s, i, d);
            v -= pb[i] * partial_q(comp_a, s, i, d) + dtpb[i] * partial_qdot(comp_a, s, i, d);
        }
        out[j] = v;
    }
    return out;
}

/// Extended vector field Y = tau D_t + X^E acting on (t, q, qdot):
/// components (tau, P + tau qdot, D_t P + tau f).
struct ExtendedField {
    std::function<double(const State&)> t_component;
    std::function<Vec(const State&)> q_components;
    std::function<Vec(const State&)> qdot_components;
};

inline ExtendedField gauge_extend(const SystemDef& sys, const SymmetryField& x,
                                  std::function<double(const State&)> tau) {
    ExtendedField y;
    y.t_component = tau;
    y.q_components = [&sys, x, tau](const State& s) {
        Vec p = x.p(s);
        double tv = tau(s);
        for (std::size_t i = 0; i < sys.n_dof; ++i) p[i] += tv * s.qdot[i];
        return p;
    };
    y.qdot_components = [&sys, x, tau](const State& s) {
        auto [p, dtp] = prolong(sys, x, s);
        double tv = tau(s);
        Vec f = sys.force(s);
        for (std::size_t i = 0; i < sys.n_dof; ++i) dtp[i] += tv * f[i];
        return dtp;
    };
    return y;
}

/// Action of an extended field on a scalar: tau dC/dt + Yq.dC/dq + Yqdot.dC/dqdot.
inline double extended_action(const SystemDef& sys, const ExtendedField& y, const ScalarField& c,
                              const State& s) {
    double v = y.t_component(s) * partial_t(c.eval, s, sys.diff);
    Vec yq = y.q_components(s);
    Vec yv = y.qdot_components(s);
    for (std::size_t i = 0; i < sys.n_dof; ++i) {
        v += yq[i] * partial_q(c.eval, s, i, sys.diff);
        v += yv[i] * partial_qdot(c.eval, s, i, sys.diff);
    }
    return v;
}

enum class SymmetryType { point, dynamical };

/// Point/dynamical classification by finite differences: point iff
/// dP^i/dqdot^j = -tau delta^i_j with a common tau independent of qdot,
/// sampled at every provided state plus qdot-perturbed companions.
inline SymmetryType classify_symmetry(const SystemDef& sys, const SymmetryField& x,
                                      const std::vector<State>& samples, double tol = 1e-6) {
    const std::size_t n = sys.n_dof;
    for (const State& s0 : samples) {
        double tau_ref = 0.0;
        bool have_ref = false;
        for (int pert = 0; pert < 20; ++pert) {
            State s = s0;
            for (std::size_t i = 0; i < n; ++i)
                s.qdot[i] += 0.05 * pert * ((i + pert) % 2 ? 1.0 : -0.7);
            Mat jac(n);
            double scale = 1.0;
            const DiffScheme d = sys.diff.widened();
            for (std::size_t j = 0; j < n; ++j) {
                auto comp = [&](const State& u) { return x.p(u)[j]; };
                for (std::size_t i = 0; i < n; ++i) {
                    jac(j, i) = partial_qdot(comp, s, i, d);
                    scale = std::max(scale, std::fabs(jac(j, i)));
                }
            }
            double tau = 0.0;
            for (std::size_t i = 0; i < n; ++i) tau -= jac(i, i) / n;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double want = (i == j) ? -tau : 0.0;
                    if (std::fabs(jac(i, j) - want) > tol * scale) return SymmetryType::dynamical;
                }
            if (have_ref) {
                if (std::fabs(tau - tau_ref) > tol * std::max(1.0, std::fabs(tau_ref)))
                    return SymmetryType::dynamical;  // tau depends on qdot
            } else {
                tau_ref = tau;
                have_ref = true;
            }
        }
    }
    return SymmetryType::point;
}

/// Reconstruct a conserved integral from its variational symmetry by a line
/// integral of the Noether one-form along the straight segment base -> target
/// in (t, q, qdot).  C(base) = 0 fixes the additive constant.
inline double integral_from_symmetry(const SystemDef& sys, const SymmetryField& x,
                                     const State& base, const State& target,
                                     double quad_tol = 1e-11) {
    const std::size_t n = sys.n_dof;

    // w_k = g_kj P^j,  S = g_ij f^i P^j,
    // m_k = dS/dqdot^k + dw_k/dt + qdot^i dw_k/dq^i
    auto w_all = [&](const State& s) { return hessian(sys, s).mul(x.p(s)); };
    auto S = [&](const State& s) { return dot(hessian(sys, s).mul(sys.force(s)), x.p(s)); };
    auto m_comp = [&](const State& s, std::size_t k) {
        auto wk = [&w_all, k](const State& u) { return w_all(u)[k]; };
        double v = partial_qdot(S, s, k, sys.diff) + partial_t(wk, s, sys.diff);
        for (std::size_t i = 0; i < n; ++i) v += s.qdot[i] * partial_q(wk, s, i, sys.diff);
        return v;
    };

    double dt = target.t - base.t;
    Vec dq = target.q - base.q;
    Vec dv = target.qdot - base.qdot;

    auto integrand = [&](double u) {
        State s = base;
        s.t += u * dt;
        for (std::size_t i = 0; i < n; ++i) {
            s.q[i] += u * dq[i];
            s.qdot[i] += u * dv[i];
        }
        double val = 0.0;
        if (dt != 0.0) {
            double qm = 0.0;
            for (std::size_t k = 0; k < n; ++k) qm += s.qdot[k] * m_comp(s, k);
            val += (-S(s) + qm) * dt;
        }
        for (std::size_t k = 0; k < n; ++k)
            if (dq[k] != 0.0) val -= m_comp(s, k) * dq[k];
        Vec w = w_all(s);
        for (std::size_t k = 0; k < n; ++k) val += w[k] * dv[k];
        return val;
    };
    QuadOptions opt;
    opt.abs_tol = quad_tol;
    opt.rel_tol = quad_tol;
    return integrate_adaptive(integrand, 0.0, 1.0, opt);
}

/// Same line integral along an explicit polyline; used by the
/// path-independence property tests.
inline double integral_from_symmetry_path(const SystemDef& sys, const SymmetryField& x,
                                          const std::vector<State>& waypoints,
                                          double quad_tol = 1e-11) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
        total += integral_from_symmetry(sys, x, waypoints[i], waypoints[i + 1], quad_tol);
    return total;
}

}  // namespace noether
