#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "noether/linalg.hpp"

namespace noether {

/// A point (t, q, qdot) in extended phase space.  `aux` carries optional
/// co-integrated channels (companion equations, accumulated quadratures)
/// that ride along with the trajectory but are not degrees of freedom.
struct State {
    double t = 0.0;
    Vec q;
    Vec qdot;
    Vec aux;

    State() = default;
    State(double t_, Vec q_, Vec qdot_) : t(t_), q(std::move(q_)), qdot(std::move(qdot_)) {}
    State(double t_, Vec q_, Vec qdot_, Vec aux_)
        : t(t_), q(std::move(q_)), qdot(std::move(qdot_)), aux(std::move(aux_)) {}

    std::size_t n_dof() const { return q.size(); }
    bool finite() const { return std::isfinite(t) && all_finite(q) && all_finite(qdot) && all_finite(aux); }
};

/// Finite-difference configuration.  Default steps follow the usual
/// machine-epsilon power rules; analytic callbacks on SystemDef override
/// the differenced paths entirely.
struct DiffScheme {
    double first_order_step = 6.0e-6;    // ~eps^(1/3)
    double second_order_step = 1.22e-4;  // ~eps^(1/4), for nested differences
    double field_step = 3.0e-4;          // for differentiating computed (noisy) fields
    double step(double x) const { return first_order_step * std::max(1.0, std::fabs(x)); }
    double step2(double x) const { return second_order_step * std::max(1.0, std::fabs(x)); }

    DiffScheme widened() const {
        DiffScheme d = *this;
        d.first_order_step = field_step;
        return d;
    }
};

/// A dynamical system qddot^i = f^i(t,q,qdot) together with its Lagrangian.
///
/// `force` and `lagrangian` are mandatory.  `hessian_fn` (d2L/dqdot dqdot) and
/// `mixed_fn` (d2L/dq dqdot, row i = q-index, column j = qdot-index) are
/// optional analytic fast paths.  `aux_rhs` defines co-integrated channels.
struct SystemDef {
    std::size_t n_dof = 0;
    std::function<Vec(const State&)> force;
    std::function<double(const State&)> lagrangian;
    std::string name;
    DiffScheme diff;

    std::function<Mat(const State&)> hessian_fn;
    std::function<Mat(const State&)> mixed_fn;

    std::size_t n_aux = 0;
    std::function<Vec(const State&)> aux_rhs;

    double hessian_det_tol = 1e-12;
};

enum class FieldKind { constant_of_motion, temporal_integral, local_integral };

/// Scalar function of State with conservation metadata.
struct ScalarField {
    std::function<double(const State&)> eval;
    FieldKind kind = FieldKind::constant_of_motion;
    std::string name;

    double operator()(const State& s) const { return eval(s); }
};

/// Characteristic components P^i of a variational symmetry; `tau` is an
/// optional gauge function used when extending to the time direction.
struct SymmetryField {
    std::function<Vec(const State&)> p;
    std::function<double(const State&)> tau;
    std::string name;

    Vec operator()(const State& s) const { return p(s); }
};

}  // namespace noether
