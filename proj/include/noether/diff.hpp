#pragma once

#include <functional>

#include "noether/state.hpp"

namespace noether {

namespace detail {
enum class Slot { time, pos, vel };

inline double& slot_ref(State& s, Slot which, std::size_t i) {
    switch (which) {
        case Slot::time: return s.t;
        case Slot::pos: return s.q[i];
        default: return s.qdot[i];
    }
}
}  // namespace detail

/// Central difference of a scalar function of State along one coordinate.
template <class F>
double partial(const F& f, const State& s, detail::Slot which, std::size_t i,
               const DiffScheme& d = {}) {
    State sp = s, sm = s;
    double x = detail::slot_ref(sp, which, i);
    double h = d.step(x);
    detail::slot_ref(sp, which, i) = x + h;
    detail::slot_ref(sm, which, i) = x - h;
    return (f(sp) - f(sm)) / (2.0 * h);
}

template <class F>
double partial_t(const F& f, const State& s, const DiffScheme& d = {}) {
    return partial(f, s, detail::Slot::time, 0, d);
}
template <class F>
double partial_q(const F& f, const State& s, std::size_t i, const DiffScheme& d = {}) {
    return partial(f, s, detail::Slot::pos, i, d);
}
template <class F>
double partial_qdot(const F& f, const State& s, std::size_t i, const DiffScheme& d = {}) {
    return partial(f, s, detail::Slot::vel, i, d);
}

/// Gradient in (q, qdot): first n entries d/dq, next n entries d/dqdot.
template <class F>
Vec grad_phase(const F& f, const State& s, const DiffScheme& d = {}) {
    std::size_t n = s.n_dof();
    Vec g(2 * n);
    for (std::size_t i = 0; i < n; ++i) g[i] = partial_q(f, s, i, d);
    for (std::size_t i = 0; i < n; ++i) g[n + i] = partial_qdot(f, s, i, d);
    return g;
}

/// Mixed second derivative d2f/(da db) by nested central differences with the
/// wider second-order step.
template <class F>
double partial2(const F& f, const State& s, detail::Slot wa, std::size_t ia,
                detail::Slot wb, std::size_t ib, const DiffScheme& d = {}) {
    State spp = s, spm = s, smp = s, smm = s;
    double xa = detail::slot_ref(spp, wa, ia);
    double xb = detail::slot_ref(spp, wb, ib);
    double ha = d.step2(xa), hb = d.step2(xb);
    detail::slot_ref(spp, wa, ia) += ha;
    detail::slot_ref(spp, wb, ib) += hb;
    detail::slot_ref(spm, wa, ia) += ha;
    detail::slot_ref(spm, wb, ib) -= hb;
    detail::slot_ref(smp, wa, ia) -= ha;
    detail::slot_ref(smp, wb, ib) += hb;
    detail::slot_ref(smm, wa, ia) -= ha;
    detail::slot_ref(smm, wb, ib) -= hb;
    return (f(spp) - f(spm) - f(smp) + f(smm)) / (4.0 * ha * hb);
}

}  // namespace noether
