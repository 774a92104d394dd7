#pragma once

#include <cmath>

#include "noether/errors.hpp"

namespace noether {

// Carlson symmetric forms, evaluated by the duplication theorem to ~1e-13
// relative accuracy.  Argument checks follow the standard real-domain rules:
// RF/RD take nonnegative arguments with at most one zero, RJ needs p > 0.

inline double carlson_rf(double x, double y, double z) {
    if (x < 0 || y < 0 || z < 0 || (x + y) == 0 || (y + z) == 0 || (z + x) == 0)
        throw DomainError("carlson_rf: invalid arguments");
    const double errtol = 2.5e-4;  // yields ~1e-13 relative error
    double xt = x, yt = y, zt = z, mu, dx, dy, dz;
    do {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = (xt + yt + zt) / 3.0;
        dx = (mu - xt) / mu;
        dy = (mu - yt) / mu;
        dz = (mu - zt) / mu;
    } while (std::fabs(dx) > errtol || std::fabs(dy) > errtol || std::fabs(dz) > errtol);
    double e2 = dx * dy - dz * dz, e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
}

inline double carlson_rc(double x, double y) {
    if (x < 0 || y == 0) throw DomainError("carlson_rc: invalid arguments");
    // negative y handled by the standard Cauchy principal-value relation
    double w = 1.0;
    if (y < 0) {
        w = std::sqrt(x / (x - y));
        x = x - y;
        y = -y;
    }
    const double errtol = 6.5e-4;
    double xt = x, yt = y, mu, s;
    do {
        double lam = 2.0 * std::sqrt(xt) * std::sqrt(yt) + yt;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        mu = (xt + 2.0 * yt) / 3.0;
        s = (yt - mu) / mu;
    } while (std::fabs(s) > errtol);
    double val = (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) / std::sqrt(mu);
    return w * val;
}

inline double carlson_rd(double x, double y, double z) {
    if (x < 0 || y < 0 || z <= 0 || (x + y) == 0)
        throw DomainError("carlson_rd: invalid arguments");
    const double errtol = 1.5e-4;
    double xt = x, yt = y, zt = z, sum = 0.0, fac = 1.0, mu, dx, dy, dz;
    do {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lam));
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = 0.2 * (xt + yt + 3.0 * zt);
        dx = (mu - xt) / mu;
        dy = (mu - yt) / mu;
        dz = (mu - zt) / mu;
    } while (std::fabs(dx) > errtol || std::fabs(dy) > errtol || std::fabs(dz) > errtol);
    double ea = dx * dy, eb = dz * dz, ec = ea - eb, ed = ea - 6.0 * eb, ee = ed + ec + ec;
    double val = 3.0 * sum +
                 fac * (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee) +
                        dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea))) /
                     (mu * std::sqrt(mu));
    return val;
}

inline double carlson_rj(double x, double y, double z, double p) {
    if (x < 0 || y < 0 || z < 0 || p <= 0 || (x + y) == 0 || (y + z) == 0 || (z + x) == 0)
        throw DomainError("carlson_rj: invalid arguments");
    const double errtol = 1.5e-4;
    double xt = x, yt = y, zt = z, pt = p, sum = 0.0, fac = 1.0, mu, dx, dy, dz, dp;
    do {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double lam = sx * (sy + sz) + sy * sz;
        double alpha = pt * (sx + sy + sz) + sx * sy * sz;
        alpha *= alpha;
        double beta = pt * (pt + lam) * (pt + lam);
        sum += fac * carlson_rc(alpha, beta);
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        pt = 0.25 * (pt + lam);
        mu = 0.2 * (xt + yt + zt + 2.0 * pt);
        dx = (mu - xt) / mu;
        dy = (mu - yt) / mu;
        dz = (mu - zt) / mu;
        dp = (mu - pt) / mu;
    } while (std::fabs(dx) > errtol || std::fabs(dy) > errtol || std::fabs(dz) > errtol ||
             std::fabs(dp) > errtol);
    double ea = dx * (dy + dz) + dy * dz, eb = dx * dy * dz, ec = dp * dp;
    double ed = ea - 3.0 * ec, ee = eb + 2.0 * dp * (ea - ec);
    double val =
        3.0 * sum + fac * (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * ee) +
                           eb * (1.0 / 6.0 + dp * (-3.0 / 11.0 + dp * 3.0 / 26.0)) +
                           dp * ea * (1.0 / 3.0 - dp * 3.0 / 22.0) - eb / 3.0 * dp) /
                        (mu * std::sqrt(mu));
    return val;
}

// Legendre forms with the sine-of-amplitude convention: the first argument is
// z = sin(amplitude).  The *_m variants take the parameter m = k^2, which may
// be negative; that is how the oblate spheroid case stays real-valued.

inline double ellip_f_m(double z, double m) {
    if (std::fabs(z) > 1.0) throw DomainError("ellip_f: |z| > 1");
    if (z == 0.0) return 0.0;
    double z2 = z * z;
    if (m * z2 >= 1.0) throw DomainError("ellip_f: m z^2 >= 1");
    double s = (z < 0) ? -1.0 : 1.0;
    double az = std::fabs(z);
    return s * az * carlson_rf(1.0 - z2, 1.0 - m * z2, 1.0);
}

inline double ellip_e_m(double z, double m) {
    if (std::fabs(z) > 1.0) throw DomainError("ellip_e: |z| > 1");
    if (z == 0.0) return 0.0;
    double z2 = z * z;
    if (m * z2 >= 1.0) throw DomainError("ellip_e: m z^2 >= 1");
    double s = (z < 0) ? -1.0 : 1.0;
    double az = std::fabs(z);
    return s * (az * carlson_rf(1.0 - z2, 1.0 - m * z2, 1.0) -
                m * az * z2 / 3.0 * carlson_rd(1.0 - z2, 1.0 - m * z2, 1.0));
}

inline double ellip_pi_m(double z, double n, double m) {
    if (std::fabs(z) > 1.0) throw DomainError("ellip_pi: |z| > 1");
    if (z == 0.0) return 0.0;
    double z2 = z * z;
    if (m * z2 >= 1.0 || n * z2 >= 1.0) throw DomainError("ellip_pi: argument out of range");
    double s = (z < 0) ? -1.0 : 1.0;
    double az = std::fabs(z);
    double rf = carlson_rf(1.0 - z2, 1.0 - m * z2, 1.0);
    if (n == 0.0) return s * az * rf;
    return s * (az * rf + n * az * z2 / 3.0 * carlson_rj(1.0 - z2, 1.0 - m * z2, 1.0, 1.0 - n * z2));
}

inline double comp_k_m(double m) {
    if (m >= 1.0) throw DomainError("comp_k: m >= 1");
    return carlson_rf(0.0, 1.0 - m, 1.0);
}

inline double comp_e_m(double m) {
    if (m >= 1.0) throw DomainError("comp_e: m >= 1");
    if (m == 0.0) return M_PI / 2.0;
    return carlson_rf(0.0, 1.0 - m, 1.0) - m / 3.0 * carlson_rd(0.0, 1.0 - m, 1.0);
}

inline double comp_pi_m(double n, double m) {
    if (m >= 1.0 || n >= 1.0) throw DomainError("comp_pi: argument out of range");
    double rf = carlson_rf(0.0, 1.0 - m, 1.0);
    if (n == 0.0) return rf;
    return rf + n / 3.0 * carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - n);
}

// modulus-k entry points (k real; k^2 passed through to the m forms)

inline double ellip_f(double z, double k) { return ellip_f_m(z, k * k); }
inline double ellip_e(double z, double k) { return ellip_e_m(z, k * k); }
inline double ellip_pi(double z, double n, double k) { return ellip_pi_m(z, n, k * k); }
inline double comp_k(double k) { return comp_k_m(k * k); }
inline double comp_e(double k) { return comp_e_m(k * k); }
inline double comp_pi(double n, double k) { return comp_pi_m(n, k * k); }

}  // namespace noether
