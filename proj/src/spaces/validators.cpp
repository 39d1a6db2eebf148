#include <algorithm>
#include <cmath>
#include <map>

#include "nlab/error.hpp"
#include "nlab/quadrature.hpp"
#include "nlab/space.hpp"

namespace nlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Measured ratio_at(const Space& space, const VolumeProfile& V, const Point& x, double r)
{
    const Measured vol = space.ball_volume(x, r);
    const double v = V.eval(r);
    return {vol.value / v, vol.uncertainty / v, vol.provenance};
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

BgiReport check_bgi(const Space& space, const VolumeProfile& V, const std::vector<double>& r_grid)
{
    require(!r_grid.empty(), "check_bgi: empty grid");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        require(r_grid[i] > r_grid[i - 1], "check_bgi: grid must be strictly increasing");
    BgiReport rep;
    rep.r = r_grid;
    const Point x0 = space.base_point();
    for (double r : r_grid) rep.ratios.push_back(ratio_at(space, V, x0, r));

    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        for (std::size_t j = i + 1; j < r_grid.size(); ++j) {
            const Measured& a = rep.ratios[i];
            const Measured& b = rep.ratios[j];
            const bool exact = a.uncertainty == 0.0 && b.uncertainty == 0.0;
            const bool bad = exact ? b.value > a.value * (1.0 + kBgiExactTol)
                                   : b.value - a.value > kBgiSigmas * std::hypot(a.uncertainty, b.uncertainty);
            if (bad) rep.violations.push_back({r_grid[i], r_grid[j], a.value, b.value});
        }
    }

    const std::size_t half = r_grid.size() / 2;
    for (std::size_t i = half; i < r_grid.size(); ++i) rep.k_bound = std::max(rep.k_bound, rep.ratios[i].value);
    rep.avr_estimate = estimate_avr(space, V, r_grid).value;
    std::vector<double> down(r_grid.rbegin(), r_grid.rend());
    rep.density_estimate = estimate_density(space, V, x0, down).value;
    rep.pass = rep.violations.empty();
    return rep;
}

Estimate estimate_avr(const Space& space, const VolumeProfile& V, const std::vector<double>& r_ladder)
{
    Estimate e;
    if (std::isfinite(space.diameter())) {
        e.value = Measured::exact(0.0);
        return e;
    }
    require(r_ladder.size() >= 3, "estimate_avr: need at least three radii");
    std::vector<double> r(r_ladder.end() - 3, r_ladder.end());
    std::vector<Measured> q;
    for (double x : r) q.push_back(ratio_at(space, V, space.base_point(), x));

    Provenance prov = Provenance::exact;
    double mc = 0.0;
    for (const auto& m : q) {
        prov = weaker(prov, m.provenance);
        mc = std::max(mc, m.uncertainty);
    }
    if (nearly_equal(q[0].value, q[2].value) && nearly_equal(q[1].value, q[2].value)) {
        e.value = {q[2].value, mc, prov};
    } else {
        // Least squares of ratio against 1/r; the intercept is the r -> inf value.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < 3; ++i) {
            const double x = 1.0 / r[i];
            sx += x;
            sy += q[i].value;
            sxx += x * x;
            sxy += x * q[i].value;
        }
        const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / 3.0;
        e.value = {icpt, mc + std::abs(icpt - q[2].value), weaker(prov, Provenance::quadrature)};
    }
    e.low_precision = e.value.uncertainty > 0.1 * std::abs(e.value.value);
    return e;
}

Estimate estimate_density(const Space& space, const VolumeProfile& V, const Point& x,
                          const std::vector<double>& r_ladder_down)
{
    require(r_ladder_down.size() >= 2, "estimate_density: need at least two radii");
    const double ra = r_ladder_down[r_ladder_down.size() - 2];
    const double rb = r_ladder_down.back();
    require(rb < ra, "estimate_density: radii must decrease");
    const Measured qa = ratio_at(space, V, x, ra);
    const Measured qb = ratio_at(space, V, x, rb);
    Estimate e;
    if (nearly_equal(qa.value, qb.value)) {
        e.value = qb;
    } else {
        // One Richardson step assuming ratio(r) = theta + c r.
        const double theta = qb.value + (qb.value - qa.value) * rb / (ra - rb);
        e.value = {theta, std::max(qa.uncertainty, qb.uncertainty) + std::abs(theta - qb.value),
                   weaker(weaker(qa.provenance, qb.provenance), Provenance::quadrature)};
    }
    e.low_precision = e.value.uncertainty > 0.1 * std::abs(e.value.value);
    return e;
}

VolumeBound check_volume_bound(const Space& space, const VolumeProfile& V,
                               const std::vector<double>& r_grid, std::size_t centers,
                               std::uint64_t seed)
{
    require(!r_grid.empty(), "check_volume_bound: empty grid");
    require(centers >= 16, "check_volume_bound: need at least 16 centres");
    const double scale = *std::max_element(r_grid.begin(), r_grid.end());
    auto pts = random_centers(space, centers - 1, scale, seed);
    pts.push_back(space.base_point());

    VolumeBound vb;
    vb.centers = pts.size();
    std::map<long, double> per_decade;
    for (double r : r_grid) {
        double m = 0.0;
        for (const auto& c : pts) m = std::max(m, ratio_at(space, V, c, r).value);
        vb.k = std::max(vb.k, m);
        const long dec = static_cast<long>(std::floor(std::log10(r)));
        per_decade[dec] = std::max(per_decade[dec], m);
    }
    for (const auto& [dec, m] : per_decade) {
        if (!vb.decade_max.empty() && m > 1.1 * vb.decade_max.back()) vb.bounded = false;
        vb.decade_max.push_back(m);
    }
    if (!std::isfinite(vb.k)) vb.bounded = false;
    return vb;
}

Measured tail_mollifier_mass(const Space& space, const MollifierFamily& family, std::size_t n,
                             const Point& x, double R)
{
    if (!(R > family.domain_floor())) throw DomainError("tail_mollifier_mass: R at or below the domain floor");
    if (R >= space.diameter()) return Measured::exact(0.0);

    const double a = family.a(n);
    const Measured mR = space.ball_volume(x, R);
    const double logT = family.log_tail_mass_at(a, R);
    const double T = std::exp(logT);

    // w = T(t)/T(R) maps [R, inf) onto (0, 1]; the integrand becomes
    // (m(B_t) - m(B_R)) kappa(t) with rho'(t) = -S rho kappa.
    const double t_cap = family.profile().inverse(1e200);
    const double w_cap = std::clamp(std::exp(family.log_tail_mass_at(a, t_cap) - logT), 1e-300, 1.0);
    double rel_unc = mR.value > 0.0 ? mR.relative_uncertainty() : 0.0;
    Provenance prov = weaker(mR.provenance, Provenance::quadrature);
    auto g = [&](double w) {
        double t = w >= 1.0 ? R : family.sample_radius_at(a, R, w);
        if (!std::isfinite(t) || t > t_cap) t = t_cap;
        const Measured mt = space.ball_volume(x, t);
        return (mt.value - mR.value) * family.kappa_at(a, t);
    };

    // Decade pieces from w = 1 down to w_cap; partial sums feed the
    // divergence check at 1e-4, 1e-8 and 1e-12.
    double sum = 0.0;
    double err = 0.0;
    double hi = 1.0;
    std::vector<std::pair<double, double>> partial;
    while (hi > w_cap) {
        const double lo = std::max(w_cap, 0.1 * hi);
        const auto piece = quad::gk(g, lo, hi, 1e-12);
        sum += piece.value;
        err += piece.error;
        partial.emplace_back(lo, sum);
        hi = lo;
    }
    auto partial_at = [&](double w) {
        for (const auto& [lo, s] : partial)
            if (lo <= w * (1.0 + 1e-9)) return s;
        return sum;
    };
    if (w_cap < 1e-12) {
        const double p4 = partial_at(1e-4);
        const double p8 = partial_at(1e-8);
        const double p12 = partial_at(1e-12);
        if (p12 - p8 >= p8 - p4 && p12 - p8 > 1e-12 * std::abs(p12))
            throw DivergenceError("tail_mollifier_mass: truncated tail integrals do not converge");
    }
    // Below w_cap the integrand has settled; take it as constant there.
    sum += w_cap * g(w_cap);
    const double value = T * sum;
    return {value, T * err + rel_unc * std::abs(value), prov};
}

}  // namespace nlab
