#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "noether/errors.hpp"

namespace noether {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec operator+(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec operator*(double c, Vec a) {
    for (double& x : a) x *= c;
    return a;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(const Vec& a) {
    double m = 0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

/// Dense square matrix, row-major; sized for the handful of degrees of
/// freedom these systems have.
class Mat {
public:
    Mat() : n_(0) {}
    explicit Mat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat transpose() const {
        Mat m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    Vec mul(const Vec& x) const {
        Vec y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    Mat mul(const Mat& b) const {
        Mat c(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                double aik = (*this)(i, k);
                for (std::size_t j = 0; j < n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    /// Determinant by LU with partial pivoting.
    double det() const {
        Mat lu(*this);
        double d = 1.0;
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n_; ++i)
                if (std::fabs(lu(i, k)) > std::fabs(lu(p, k))) p = i;
            if (p != k) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(lu(p, j), lu(k, j));
                d = -d;
            }
            if (lu(k, k) == 0.0) return 0.0;
            d *= lu(k, k);
            for (std::size_t i = k + 1; i < n_; ++i) {
                double f = lu(i, k) / lu(k, k);
                for (std::size_t j = k; j < n_; ++j) lu(i, j) -= f * lu(k, j);
            }
        }
        return d;
    }

    /// Solve A x = b; throws SingularHessian on a pivot collapse.
    Vec solve(Vec b) const {
        Mat lu(*this);
        std::vector<std::size_t> perm(n_);
        for (std::size_t i = 0; i < n_; ++i) perm[i] = i;
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n_; ++i)
                if (std::fabs(lu(i, k)) > std::fabs(lu(p, k))) p = i;
            if (p != k) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(lu(p, j), lu(k, j));
                std::swap(b[p], b[k]);
            }
            if (std::fabs(lu(k, k)) < 1e-300)
                throw SingularHessian("matrix solve: zero pivot");
            for (std::size_t i = k + 1; i < n_; ++i) {
                double f = lu(i, k) / lu(k, k);
                lu(i, k) = 0;
                for (std::size_t j = k + 1; j < n_; ++j) lu(i, j) -= f * lu(k, j);
                b[i] -= f * b[k];
            }
        }
        Vec x(n_);
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            for (std::size_t j = ii + 1; j < n_; ++j) s -= lu(ii, j) * x[j];
            x[ii] = s / lu(ii, ii);
        }
        return x;
    }

    Mat inverse() const {
        Mat inv(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            Vec e(n_, 0.0);
            e[j] = 1.0;
            Vec col = solve(e);
            for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

private:
    std::size_t n_;
    std::vector<double> a_;
};

}  // namespace noether
