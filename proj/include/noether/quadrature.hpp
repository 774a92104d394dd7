#pragma once

#include <cmath>
#include <functional>

#include "noether/errors.hpp"

namespace noether {

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK values)
inline constexpr double kGK15X[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double resk = kGK15WK[7] * fc;
    double resg = kGK15WG[3] * fc;
    for (int j = 0; j < 7; ++j) {
        double x = h * kGK15X[j];
        double f1 = f(c - x), f2 = f(c + x);
        resk += kGK15WK[j] * (f1 + f2);
        if (j % 2 == 1) resg += kGK15WG[j / 2] * (f1 + f2);
    }
    result = resk * h;
    err = std::fabs((resk - resg) * h);
}

}  // namespace detail

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_depth = 48;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b] (a > b allowed).
template <class F>
double integrate_adaptive(const F& f, double a, double b, QuadOptions opt = {}) {
    if (a == b) return 0.0;
    struct Rec {
        const F& f;
        const QuadOptions& opt;
        double run(double lo, double hi, double whole, double err, int depth) const {
            if (err <= opt.abs_tol + opt.rel_tol * std::fabs(whole)) return whole;
            if (depth >= opt.max_depth)
                throw QuadratureFailure("adaptive quadrature: max depth reached");
            double mid = 0.5 * (lo + hi);
            double left, lerr, right, rerr;
            detail::gk15(f, lo, mid, left, lerr);
            detail::gk15(f, mid, hi, right, rerr);
            QuadOptions half = opt;  // split the budget between the halves
            return run(lo, mid, left, lerr, depth + 1) + run(mid, hi, right, rerr, depth + 1);
        }
    };
    double whole, err;
    detail::gk15(f, a, b, whole, err);
    if (!std::isfinite(whole)) throw QuadratureFailure("quadrature: non-finite integrand");
    double result = Rec{f, opt}.run(a, b, whole, err, 0);
    if (!std::isfinite(result)) throw QuadratureFailure("quadrature: non-finite result");
    return result;
}

}  // namespace noether
