#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ccm {

// Scalar numerics shared by the pool metrics and the verification oracles:
// Richardson-extrapolated central differences, adaptive Simpson quadrature,
// and bracketed scalar root finding.

// Roundoff-balanced step: eps^(1/3) of the argument scale for first
// derivatives, eps^(1/4) for second derivatives, where the roundoff term
// carries an extra 1/h.
inline double fd_step(double at, int order) {
    const double scale = std::max(std::abs(at), 1.0);
    return (order == 1 ? 6.1e-6 : 1.3e-4) * scale;
}

// Central-difference derivative of order 1 or 2 with one level of Richardson
// extrapolation. Throws if f evaluates to a non-finite value near `at`.
inline double fd_derivative(const std::function<double(double)>& f, double at, int order) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("fd_derivative: order must be 1 or 2");
    }
    const double h = fd_step(at, order);
    auto eval = [&](double x) {
        double v = f(x);
        if (!std::isfinite(v)) {
            throw std::runtime_error("fd_derivative: non-finite evaluation");
        }
        return v;
    };
    auto stencil = [&](double step) {
        if (order == 1) {
            return (eval(at + step) - eval(at - step)) / (2.0 * step);
        }
        return (eval(at + step) - 2.0 * eval(at) + eval(at - step)) / (step * step);
    };
    const double coarse = stencil(h);
    const double fine = stencil(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

namespace detail {

inline double simpson(const std::function<double(double)>& f,
                      double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fb, double fm,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, flm);
    const double right = simpson(f, m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with an absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double abs_tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = detail::simpson(f, a, fa, b, fb, fm);
    return detail::adaptive_simpson_rec(f, a, b, fa, fb, fm, whole, abs_tol, 48);
}

// Bisection on a bracketing interval [lo, hi] with f(lo) and f(hi) of opposite
// sign. Converges to the stated relative tolerance or the iteration cap.
inline double find_root_bracketed(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  double rel_tol = 1e-14, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw std::invalid_argument("find_root_bracketed: interval does not bracket a root");
    }
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ccm
