#pragma once
// Thin wrappers over Boost.Math quadrature returning value and error estimate.

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace nlab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

inline Result operator+(Result a, Result b) { return {a.value + b.value, a.error + b.error}; }

/// Adaptive 61-point Gauss-Kronrod on a finite interval. The interval is
/// mapped to [0, 1] first: Boost compares the unscaled local error with a
/// scaled tolerance, which never terminates on short intervals.
template <class F>
Result gk(F&& f, double a, double b, double tol = 1e-12, unsigned depth = 12)
{
    if (!(b > a)) return {};
    const double w = b - a;
    auto g = [&](double s) { return f(a + w * s); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, depth,
                                                                                   tol, &err);
    return {w * v, w * err};
}

/// Fixed 30-point Gauss-Legendre.
template <class F>
double gl(F&& f, double a, double b)
{
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

/// Integral over [0, h] of g(t) where g may be singular at t = 0 and t = h.
/// g(t, h - t) receives both distances to the endpoints, each computed
/// without cancellation near its own endpoint.
template <class G>
Result endpoint(G&& g, double h, double tol = 1e-11)
{
    if (!(h > 0.0)) return {};
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double err = 0.0;
    double l1 = 0.0;
    auto f = [&](double x, double xc) {
        const double t = xc < 0.0 ? -xc : x;
        const double tc = xc < 0.0 ? h + xc : xc;
        const double v = g(t, tc);
        return std::isfinite(v) ? v : 0.0;
    };
    const double v = integrator.integrate(f, 0.0, h, tol, &err, &l1);
    return {v, err};
}

/// Integral over [a, inf) of a decaying integrand.
template <class F>
Result half_line(F&& f, double a, double tol = 1e-11)
{
    static thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
    double err = 0.0;
    double l1 = 0.0;
    auto g = [&](double t) {
        const double v = f(a + t);
        return std::isfinite(v) ? v : 0.0;
    };
    const double v = integrator.integrate(g, tol, &err, &l1);
    return {v, err};
}

}  // namespace nlab::quad
