#pragma once
// Independent reference values for the tests: brute-force grids and
// closed forms that do not go through the library's estimators.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nlab/space.hpp"
#include "nlab/test_function.hpp"

namespace oracle {

/// Energy of the indicator of [0,1] on the real line for rho(t) = a t^{-1-a}:
/// 2 int_0^1 (x^{-a} + (1-x)^{-a}) dx.
inline double unit_interval_energy(double a) { return 4.0 / (1.0 - a); }

/// Same for the tent 1 - |x - c| / r, p = 1. With D(h) = int |u(x+h) - u(x)| dx
/// equal to r(2s - s^2/2), r(2 - (2-s)^2/2), 2r for s = h/r in [0,1], [1,2],
/// [2,inf): E = 2 int_0^inf a h^{-1-a} D(h) dh.
inline double tent_energy(double a, double r)
{
    return std::pow(r, 1.0 - a) * std::pow(2.0, 3.0 - a) / ((1.0 - a) * (2.0 - a));
}

struct LineGrid {
    const nlab::Space* space = nullptr;
    nlab::TestFunction u;
    std::function<double(double)> kernel;  // rho as a function of distance
    double lo = 0.0;  // chart box; for a circle the box must be one period
    double hi = 1.0;
    std::size_t nodes = 10'000;
};

/// Midpoint double sum over nodes x nodes of the chart box. Distances
/// depend only on the offset, so the sum is grouped by index difference.
/// The i = j cells are left out (zero for piecewise-constant u away from
/// jumps, O(h^{1+p-a}) otherwise). Pairs with one point outside the box
/// are integrated per node along the chart; u vanishes there.
inline double line_grid_energy(const LineGrid& g)
{
    const nlab::LineChart* chart = g.space->line();
    const double period = chart->period();
    const bool periodic = std::isfinite(period);
    const std::size_t n = g.nodes;
    const double h = (g.hi - g.lo) / static_cast<double>(n);
    const double p = g.u.p;

    std::vector<double> uv(n);
    for (std::size_t i = 0; i < n; ++i) {
        nlab::Point x{};
        x[0] = g.lo + (static_cast<double>(i) + 0.5) * h;
        uv[i] = g.u(*g.space, x);
    }
    auto dist_of = [&](double off) {
        if (periodic) off = std::min(off, period - off);
        return chart->distance_of_offset(off);
    };

    auto pw = [p](double d) { return p == 1.0 ? d : p == 2.0 ? d * d : std::pow(d, p); };
    double inside = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
        const double k = g.kernel(dist_of(static_cast<double>(m) * h));
        double s = 0.0;
        if (periodic) {
            for (std::size_t i = 0; i < n; ++i) s += pw(std::abs(uv[i] - uv[(i + m) % n]));
        } else {
            for (std::size_t i = 0; i + m < n; ++i) s += 2.0 * pw(std::abs(uv[i] - uv[i + m]));
        }
        inside += k * s;
    }
    inside *= h * h;
    if (periodic) return inside;

    boost::math::quadrature::exp_sinh<double> es;
    auto tail = [&](double delta) {
        auto f = [&](double v) {
            const double t = delta * std::exp(v);
            if (!std::isfinite(t)) return 0.0;
            const double k = g.kernel(chart->distance_of_offset(t)) * t;
            return std::isfinite(k) ? k : 0.0;
        };
        return es.integrate(f, 1e-13);
    };
    double outside = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (uv[i] == 0.0) continue;
        const double x = (static_cast<double>(i) + 0.5) * h;
        outside += std::pow(uv[i], p) * (tail(x) + tail(g.hi - g.lo - x));
    }
    return inside + 2.0 * h * outside;
}

/// Composite Gauss-Legendre on [a, b] with `panels` 20-point panels.
template <class F>
double composite_gl(F&& f, double a, double b, int panels)
{
    const double w = (b - a) / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k)
        s += boost::math::quadrature::gauss<double, 20>::integrate(f, a + k * w, a + (k + 1) * w);
    return s;
}

/// E = int_0^inf 2 pi r rho(r) D(r) dr for a radial function phi(|x|) on
/// the plane supported in the unit disk, D(r) = int |u(x + r e1) - u(x)|^p dx
/// by tensor Gauss-Legendre.
struct PlaneRadial {
    std::function<double(double)> phi;  // profile of |x|, zero beyond 1
    std::function<double(double)> kernel;  // rho(r)
    double p = 2.0;
    int panels = 32;
};

inline double plane_norm_p_pow(const PlaneRadial& o)
{
    auto f = [&](double r) { return 2.0 * std::numbers::pi * r * std::pow(o.phi(r), o.p); };
    return composite_gl(f, 0.0, 1.0, o.panels);
}

inline double plane_difference(const PlaneRadial& o, double r)
{
    auto u = [&](double x, double y) { return o.phi(std::hypot(x, y)); };
    auto row = [&](double y) {
        auto g = [&](double x) { return std::pow(std::abs(u(x + r, y) - u(x, y)), o.p); };
        return composite_gl(g, -1.0 - r, 1.0, o.panels);
    };
    return 2.0 * composite_gl(row, 0.0, 1.0, o.panels);
}

inline double plane_radial_energy(const PlaneRadial& o)
{
    const double np = plane_norm_p_pow(o);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto near = [&](double r) {
        const double f = 2.0 * std::numbers::pi * r * o.kernel(r) * plane_difference(o, r);
        return std::isfinite(f) ? f : 0.0;
    };
    const double e_near = ts.integrate(near, 0.0, 2.0, 1e-11);
    boost::math::quadrature::exp_sinh<double> es;
    auto far = [&](double v) {
        const double r = 2.0 * std::exp(v);
        const double f = 2.0 * std::numbers::pi * r * o.kernel(r) * r;
        return std::isfinite(f) ? f : 0.0;
    };
    return e_near + 2.0 * np * es.integrate(far, 1e-13);
}

/// Indicator of the unit disk, any p: D(r) = 2 (pi - lens(r)) with
/// lens(r) = 2 acos(r/2) - (r/2) sqrt(4 - r^2) for r < 2, and 2 pi beyond.
inline double disk_indicator_energy(const std::function<double(double)>& kernel)
{
    const double pi = std::numbers::pi;
    auto D = [&](double r) {
        if (r >= 2.0) return 2.0 * pi;
        return 2.0 * (pi - (2.0 * std::acos(r / 2.0) - 0.5 * r * std::sqrt(4.0 - r * r)));
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    auto near = [&](double r) {
        const double f = 2.0 * pi * r * kernel(r) * D(r);
        return std::isfinite(f) ? f : 0.0;
    };
    boost::math::quadrature::exp_sinh<double> es;
    auto far = [&](double v) {
        const double r = 2.0 * std::exp(v);
        const double f = 2.0 * pi * r * kernel(r) * r;
        return std::isfinite(f) ? f : 0.0;
    };
    return ts.integrate(near, 0.0, 2.0, 1e-12) + 2.0 * pi * es.integrate(far, 1e-13);
}

/// m(B_1) for the Koranyi gauge: pi int_0^1 rho sqrt(1 - rho^4) d rho = pi^2 / 8.
inline double koranyi_unit_ball() { return std::numbers::pi * std::numbers::pi / 8.0; }

}  // namespace oracle
