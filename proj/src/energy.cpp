#include "nlab/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "nlab/error.hpp"
#include "nlab/quadrature.hpp"
#include "nlab/simd/kernels.hpp"

namespace nlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double r_cap_of(const MollifierFamily& fam) { return fam.profile().inverse(1e200); }

// --- one-dimensional quadrature ---------------------------------------------

struct LineQuad {
    const Space& space;
    const LineChart& line;
    const TestFunction& u;
    const MollifierFamily& fam;
    double a;
    double r0;
    double tol;
    double P;
    double c;
    double lo;
    double hi;
    double r_cap;
    bool ratio_constant = false;
    double ratio_value = 0.0;

    // The shell ratio is exactly constant when the family profile is the
    // chart's own volume function (warped lines, the Euclidean line).
    void detect_constant_ratio()
    {
        const double r1 = shell_ratio(std::max(1e-3, 2.0 * fam.domain_floor()));
        ratio_constant = true;
        for (double r : {1e-2, 0.1, 0.7, 1.0, 3.0, 10.0, 100.0, 1e4}) {
            if (!(r > fam.domain_floor())) continue;
            if (std::abs(shell_ratio(r) - r1) > 1e-14 * std::abs(r1)) ratio_constant = false;
        }
        if (std::isfinite(P)) ratio_constant = false;
        ratio_value = r1;
    }

    double u_at_offset(double off) const { return u.shape(line.distance_of_offset(std::abs(off)) / u.radius); }

    double shell_ratio(double r) const
    {
        const double re = std::isfinite(r) && r <= r_cap ? r : r_cap;
        return line.side_density(re) / fam.profile().deriv(re);
    }

    // int_{d1}^{d2} rho(r) sigma(r) dr through w = T(r)/T(d1).
    quad::Result K(double d1, double d2) const
    {
        d1 = std::max(d1, 0.0);
        if (!(d2 > d1)) return {};
        if (d1 <= fam.domain_floor()) return {kInf, 0.0};
        const double l1 = fam.log_tail_mass_at(a, d1);
        const double T1 = std::exp(l1);
        const double w2 = std::isfinite(d2) ? std::exp(fam.log_tail_mass_at(a, d2) - l1) : 0.0;
        if (ratio_constant) {
            const double v = T1 * (1.0 - w2) * ratio_value;
            return {v, 0.0};
        }
        auto g = [&](double w) {
            if (w >= 1.0) return shell_ratio(d1);
            if (!(w > 0.0)) return shell_ratio(r_cap);
            return shell_ratio(fam.sample_radius_at(a, d1, w));
        };
        const auto r = quad::gk(g, w2, 1.0, 1e-13);
        return {T1 * r.value, T1 * r.error};
    }

    // Mass of y outside the support seen from x = lo + t (t + tc = hi - lo),
    // split at r0 into near and far parts.
    std::pair<double, double> outside_mass(double t, double tc) const
    {
        std::vector<std::pair<double, double>> pieces;
        if (!std::isfinite(P)) {
            pieces.emplace_back(line.distance_of_offset(tc), kInf);
            pieces.emplace_back(line.distance_of_offset(t), kInf);
        } else {
            const double half = 0.5 * P;
            const double t2 = P - t;  // forward displacement of the far end of the complement
            if (tc < half) pieces.emplace_back(tc, std::min(t2, half));
            if (t2 > half) pieces.emplace_back(t, P - std::max(tc, half));
        }
        double near = 0.0;
        double far = 0.0;
        for (auto [d1, d2] : pieces) {
            near += K(d1, std::min(d2, r0)).value;
            far += K(std::max(d1, r0), d2).value;
        }
        return {near, far};
    }

    // int_0^{tc} |u(x) - u(x + tau)|^p rho(D(tau)) dtau for x = lo + t.
    std::pair<double, double> inside(double t, double tc) const
    {
        const double x = lo + t;
        const double ux = u_at_offset(x - c);
        std::vector<double> br{0.0, tc};
        const double tau0 = line.offset_of_distance(r0);
        // Kinks: the cutoff, the centre, the mirror point where |u(x) - u(x + tau)|
        // changes sign, and the antipode on the circle.
        for (double b : {tau0, c - x, 2.0 * (c - x), 0.5 * P})
            if (b > 0.0 && b < tc) br.push_back(b);
        std::sort(br.begin(), br.end());
        double near = 0.0;
        double far = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const double b0 = br[i];
            const double len = br[i + 1] - b0;
            if (!(len > 0.0)) continue;
            auto g = [&](double s, double) {
                const double tau = b0 + s;
                const double d = line.distance_of_offset(tau);
                const double du = std::abs(ux - u_at_offset(x + tau - c));
                if (du == 0.0) return 0.0;
                return std::pow(du, u.p) * fam.rho_at(a, d);
            };
            const double v = quad::endpoint(g, len, tol).value;
            (b0 < tau0 ? near : far) += v;
        }
        return {near, far};
    }
};

// --- Monte Carlo ------------------------------------------------------------

constexpr std::size_t kBlock = 1024;
constexpr int kSlots = 32;
constexpr double kNearFraction = 0.2;

enum Region : int { region_a = 0, region_b = 1, region_c = 2 };

struct Decomp {
    double R = 0.0;
    Point x0{};
};

struct McSetup {
    const Space& space;
    const TestFunction& u;
    const MollifierFamily& fam;
    double a;
    double r0;
    double mS;
    double T0;
    double gamma;
    double r_cap;
    bool swap;
    const Decomp* dec;

    double far_ratio(const Point& x, double r) const
    {
        const double re = std::isfinite(r) && r <= r_cap ? r : r_cap;
        return space.shell_density(x, re) / fam.profile().deriv(re);
    }

    int classify(const Point& x, const Point& y, double dxy) const
    {
        if (dxy < dec->R) return region_a;
        double dx = space.distance(x, dec->x0);
        double dy = space.distance(y, dec->x0);
        if (swap) std::swap(dx, dy);
        return (dy > 2.0 * dx || dy < 0.5 * dx) ? region_b : region_c;
    }

    // Weight of one sample; `near` and `region` report where it landed.
    double sample(VariateSource& v, bool& near, int& region) const
    {
        const double branch = v.uniform();
        const Point x = space.sample_ball(u.center, u.radius, v);
        const double ux = u(space, x);
        const double q = v.uniform();
        near = branch < kNearFraction;
        double r = 0.0;
        double base = 0.0;
        if (near) {
            r = r0 * std::pow(q, 1.0 / (gamma + 1.0));
            const double g = (gamma + 1.0) * std::pow(r / r0, gamma) / r0;
            base = mS * space.shell_density(x, r) * fam.rho_at(a, r) / g / kNearFraction;
        } else {
            r = fam.sample_radius_at(a, r0, q);
            double esc = 2.0 * u.radius;
            if (dec) esc = std::max({esc, dec->R, 3.0 * space.distance(x, dec->x0)});
            if (!(r <= esc)) {
                region = region_b;
                return mS * T0 * far_ratio(x, r) * 2.0 * std::pow(ux, u.p) / (1.0 - kNearFraction);
            }
            base = mS * T0 * far_ratio(x, r) / (1.0 - kNearFraction);
        }
        if (base == 0.0) {
            region = region_a;
            return 0.0;
        }
        const Point y = space.sample_sphere(x, r, v);
        const bool in_support = space.distance(u.center, y) < u.radius;
        const double uy = in_support ? u(space, y) : 0.0;
        const double du = std::abs(ux - uy);
        const double h = (du == 0.0 ? 0.0 : std::pow(du, u.p)) * (in_support ? 1.0 : 2.0);
        region = dec ? classify(x, y, r) : region_a;
        return base * h;
    }
};

struct BlockResult {
    simd::Moments total;
    simd::Moments near;
    simd::Moments region[3];
    double residual = 0.0;
};

struct McResult {
    std::uint64_t count = 0;
    simd::Moments total, near, region[3];
    simd::Moments first_half;
    std::uint64_t half_count = 0;
    double max_residual = 0.0;
};

McResult run_blocks(const McSetup& s, std::uint64_t samples, std::uint64_t seed, unsigned workers)
{
    const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<BlockResult> blocks(nblocks);
    const std::uint32_t purpose = s.swap ? purpose::energy_swapped : purpose::energy;
    const auto& kern = simd::kernels();

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        std::vector<double> w(kBlock), wn(kBlock), wr[3];
        for (auto& v : wr) v.resize(kBlock);
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            const std::uint64_t first = b * kBlock;
            const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, samples - first));
            VariateBlock vb(seed, purpose, first, n, kSlots);
            for (std::size_t i = 0; i < n; ++i) {
                VariateSource v(vb, i);
                bool near = false;
                int region = region_a;
                const double x = s.sample(v, near, region);
                w[i] = x;
                wn[i] = near ? x : 0.0;
                for (int k = 0; k < 3; ++k) wr[k][i] = region == k ? x : 0.0;
            }
            BlockResult& br = blocks[b];
            br.total = kern.moments(w.data(), n);
            br.near = kern.moments(wn.data(), n);
            if (s.dec) {
                for (int k = 0; k < 3; ++k) br.region[k] = kern.moments(wr[k].data(), n);
                const double parts = br.region[0].sum + br.region[1].sum + br.region[2].sum;
                const double scale = std::max(std::abs(br.total.sum), 1e-300);
                br.residual = std::abs(parts - br.total.sum) / scale;
            }
        }
    };
    const unsigned nw = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(nblocks)));
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nw; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Merge in block order so the result does not depend on the schedule.
    McResult r;
    r.count = samples;
    const std::uint64_t half_blocks = nblocks / 2;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        const auto& br = blocks[b];
        r.total.sum += br.total.sum;
        r.total.sum_sq += br.total.sum_sq;
        r.near.sum += br.near.sum;
        r.near.sum_sq += br.near.sum_sq;
        for (int k = 0; k < 3; ++k) {
            r.region[k].sum += br.region[k].sum;
            r.region[k].sum_sq += br.region[k].sum_sq;
        }
        r.max_residual = std::max(r.max_residual, br.residual);
        if (b + 1 == half_blocks) {
            r.first_half = r.total;
            r.half_count = (b + 1) * kBlock;
        }
    }
    return r;
}

Measured mean_of(const simd::Moments& m, std::uint64_t n)
{
    const double N = static_cast<double>(n);
    const double mean = m.sum / N;
    const double var = n > 1 ? std::max(0.0, (m.sum_sq / N - mean * mean) * N / (N - 1.0)) : 0.0;
    return {mean, std::sqrt(var / N), Provenance::monte_carlo};
}

double local_exponent(const Space& space, const MollifierFamily& fam, double a, const Point& x, double r0)
{
    auto lg = [&](double r) { return std::log(space.shell_density(x, r)) + fam.log_rho_at(a, r); };
    return (lg(1e-3 * r0) - lg(1e-6 * r0)) / std::log(1e3);
}

EnergyEstimate energy_mc_impl(const Space& space, const TestFunction& u, const MollifierFamily& fam,
                              std::size_t n, const EnergyOptions& opts, const Decomp* dec,
                              Decomposition* out_dec)
{
    require(opts.samples >= 2, "energy_mc: need at least two samples");
    const double a = fam.a(n);
    const double r0 = opts.r0 ? *opts.r0 : default_r0(fam, n, u);
    if (!(r0 > fam.domain_floor())) throw InvalidParameter("energy_mc: r0 at or below the domain floor");

    const Measured mS = space.ball_volume(u.center, u.radius);
    double e = local_exponent(space, fam, a, u.center, r0);
    if (!std::isfinite(e)) e = -1.0;
    const double k1 = u.is_indicator() ? 1.0 : u.p;
    const double k2 = u.is_indicator() ? 1.0 : 2.0 * u.p;
    const double gamma = std::max(-0.9, std::min(e + k1, e + 0.5 * k2));

    McSetup s{space, u, fam, a, r0, mS.value, fam.tail_mass_at(a, r0), gamma, r_cap_of(fam), opts.swap_roles, dec};
    const McResult res = run_blocks(s, opts.samples, opts.seed, opts.workers);

    const Measured tot = mean_of(res.total, res.count);
    const Measured nr = mean_of(res.near, res.count);
    if (!std::isfinite(tot.value) || !std::isfinite(tot.uncertainty))
        throw NumericalError("energy_mc: non-finite estimate or variance");

    EnergyEstimate est;
    est.value = tot.value;
    est.stat_stderr = tot.uncertainty;
    est.near_part = nr.value;
    est.far_part = tot.value - nr.value;
    est.provenance = Provenance::monte_carlo;
    double rel = mS.relative_uncertainty();
    if (auto avr = space.avr(); avr && avr->provenance == Provenance::monte_carlo) rel += avr->relative_uncertainty();
    est.model_uncertainty = rel * std::abs(tot.value);
    est.params = {n, a, r0, opts.samples, opts.seed, dec ? dec->R : 0.0, dec ? dec->x0 : Point{}};
    if (res.half_count > 1) est.first_half = mean_of(res.first_half, res.half_count);

    if (out_dec) {
        out_dec->I = mean_of(res.region[region_a], res.count);
        out_dec->II = mean_of(res.region[region_b], res.count);
        out_dec->III = mean_of(res.region[region_c], res.count);
        out_dec->max_partition_residual = res.max_residual;
    }
    return est;
}

}  // namespace

double default_r0(const MollifierFamily& family, std::size_t n, const TestFunction& u)
{
    double delta = 1e-3 * u.support_radius();
    if (!(delta > family.domain_floor())) delta = 2.0 * family.domain_floor();
    return family.sample_radius(n, delta, 0.99);
}

EnergyEstimate energy_quadrature_1d_at(const Space& space, const TestFunction& u,
                                       const MollifierFamily& family, double a,
                                       const EnergyOptions& opts)
{
    const LineChart* line = space.line();
    require(line != nullptr, "energy_quadrature_1d: space has no one-dimensional chart");
    const double P = line->period();
    const double h = line->offset_of_distance(u.radius);
    require(!(2.0 * h >= P), "energy_quadrature_1d: support must not cover the whole circle");

    double r0 = 0.0;
    if (opts.r0) {
        r0 = *opts.r0;
    } else {
        double delta = 1e-3 * u.support_radius();
        if (!(delta > family.domain_floor())) delta = 2.0 * family.domain_floor();
        r0 = family.sample_radius_at(a, delta, 0.99);
    }
    const double c = u.center[0];
    LineQuad lq{space, *line, u, family, a, r0, opts.tol, P, c, c - h, c + h, r_cap_of(family)};
    lq.detect_constant_ratio();
    const double len = 2.0 * h;

    // Outer integrals over x = lo + t, split wherever the integrand has a
    // kink: the centre, and the offsets where the r0 cutoff meets a support
    // end, the centre or the mirror point of the inner integral.
    const double tau0 = line->offset_of_distance(r0);
    std::vector<double> cuts{0.0, h, len};
    for (double t : {tau0, len - tau0, h - tau0, h - 0.5 * tau0})
        if (t > 0.0 && t < len) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto outer = [&](auto&& f) {
        quad::Result r;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double t0 = cuts[i];
            const double t1 = cuts[i + 1];
            auto g = [&](double s, double sc) { return f(t0 + s, len - t1 + sc); };
            r = r + quad::endpoint(g, t1 - t0, opts.tol);
        }
        return r;
    };

    auto cross = [&](bool want_near) {
        return outer([&](double t, double tc) {
            const double ux = lq.u_at_offset(t - h);
            if (ux == 0.0) return 0.0;
            const auto [nr, fr] = lq.outside_mass(t, tc);
            return std::pow(ux, u.p) * (want_near ? nr : fr);
        });
    };
    quad::Result near = cross(true);
    quad::Result far = cross(false);

    if (!u.is_indicator()) {
        // Ordered pairs inside the support (forward displacements only, the
        // overall factor 2 restores symmetry).
        for (bool nb : {true, false}) {
            const quad::Result r = outer([&](double t, double tc) {
                const auto [nr, fr] = lq.inside(t, tc);
                return nb ? nr : fr;
            });
            (nb ? near : far) = (nb ? near : far) + r;
        }
    }

    EnergyEstimate est;
    est.near_part = 2.0 * near.value;
    est.far_part = 2.0 * far.value;
    est.value = est.near_part + est.far_part;
    est.quad_error = 2.0 * (near.error + far.error);
    est.provenance = Provenance::quadrature;
    est.partial = !(est.quad_error <= 1e-6 * std::abs(est.value) + 1e-12);
    est.params = {0, a, r0, 0, 0, 0.0, Point{}};
    if (!std::isfinite(est.value))
        throw HypothesisViolation("energy is infinite at a = " + std::to_string(a));
    return est;
}

EnergyEstimate energy_quadrature_1d(const Space& space, const TestFunction& u,
                                    const MollifierFamily& family, std::size_t n,
                                    const EnergyOptions& opts)
{
    EnergyEstimate e = energy_quadrature_1d_at(space, u, family, family.a(n), opts);
    e.params.n = n;
    return e;
}

EnergyEstimate energy_mc(const Space& space, const TestFunction& u, const MollifierFamily& family,
                         std::size_t n, const EnergyOptions& opts)
{
    return energy_mc_impl(space, u, family, n, opts, nullptr, nullptr);
}

Decomposition decompose_energy(const Space& space, const TestFunction& u,
                               const MollifierFamily& family, std::size_t n, double R,
                               const Point& x0, const EnergyOptions& opts)
{
    require(R > 0.0, "decompose_energy: R must be positive");
    const Decomp dec{R, x0};
    Decomposition out;
    out.total = energy_mc_impl(space, u, family, n, opts, &dec, &out);
    return out;
}

}  // namespace nlab
