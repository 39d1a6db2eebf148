#include "nlab/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlab/error.hpp"

namespace nlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    require(lo > 0.0 && hi > lo && count >= 2, "log_grid: need 0 < lo < hi, count >= 2");
    std::vector<double> g(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

// --- Generator -----------------------------------------------------------

Generator Generator::power(double alpha)
{
    require(alpha > 0.0, "power generator needs alpha > 0");
    Generator g;
    g.kind_ = GeneratorKind::power;
    g.alpha_ = alpha;
    return g;
}

Generator Generator::exponential()
{
    Generator g;
    g.kind_ = GeneratorKind::exp;
    return g;
}

Generator Generator::logarithmic()
{
    Generator g;
    g.kind_ = GeneratorKind::log;
    return g;
}

std::string Generator::name() const
{
    switch (kind_) {
    case GeneratorKind::power: return "power";
    case GeneratorKind::exp: return "exp";
    case GeneratorKind::log: return "log";
    }
    return "unknown";
}

double Generator::f(double s) const
{
    switch (kind_) {
    case GeneratorKind::power: return std::pow(s, alpha_);
    case GeneratorKind::exp: return std::exp(s);
    case GeneratorKind::log: return std::log(s);
    }
    return 0.0;
}

double Generator::f_prime(double s) const
{
    switch (kind_) {
    case GeneratorKind::power: return alpha_ * std::pow(s, alpha_ - 1.0);
    case GeneratorKind::exp: return std::exp(s);
    case GeneratorKind::log: return 1.0 / s;
    }
    return 0.0;
}

double Generator::f_inverse(double y) const
{
    switch (kind_) {
    case GeneratorKind::power: return std::pow(y, 1.0 / alpha_);
    case GeneratorKind::exp: return std::log(y);
    case GeneratorKind::log: return std::exp(y);
    }
    return 0.0;
}

double Generator::log_f(double s) const { return log_f_from_log_s(std::log(s)); }

double Generator::log_f_prime(double s) const
{
    switch (kind_) {
    case GeneratorKind::power: return std::log(alpha_) + (alpha_ - 1.0) * std::log(s);
    case GeneratorKind::exp: return s;
    case GeneratorKind::log: return -std::log(s);
    }
    return 0.0;
}

double Generator::log_f_from_log_s(double ls) const
{
    switch (kind_) {
    case GeneratorKind::power: return alpha_ * ls;
    case GeneratorKind::exp: return std::exp(ls);
    case GeneratorKind::log: return ls > 0.0 ? std::log(ls) : std::numeric_limits<double>::quiet_NaN();
    }
    return 0.0;
}

double Generator::log_fprime_over_f_from_log_s(double ls) const
{
    switch (kind_) {
    case GeneratorKind::power: return std::log(alpha_) - ls;
    case GeneratorKind::exp: return 0.0;
    case GeneratorKind::log: return -ls - std::log(ls);
    }
    return 0.0;
}

double Generator::fpp_over_fp(double s) const
{
    switch (kind_) {
    case GeneratorKind::power: return (alpha_ - 1.0) / s;
    case GeneratorKind::exp: return 1.0;
    case GeneratorKind::log: return -1.0 / s;
    }
    return 0.0;
}

double Generator::log_inverse_from_log(double ly) const
{
    switch (kind_) {
    case GeneratorKind::power: return ly / alpha_;
    case GeneratorKind::exp: return ly > 0.0 ? std::log(ly) : -kInf;
    case GeneratorKind::log: return std::exp(ly);
    }
    return 0.0;
}

std::optional<double> Generator::s_normalization(double p) const
{
    switch (kind_) {
    case GeneratorKind::power: return 1.0 / (alpha_ * p);
    case GeneratorKind::log: return 1.0 / p;
    case GeneratorKind::exp: return std::nullopt;
    }
    return std::nullopt;
}

GeneratorCheck check_generator(const Generator& g)
{
    GeneratorCheck c;
    const double s0 = g.kind() == GeneratorKind::log ? 2.0 : 1e-2;
    const auto grid = log_grid(s0, s0 * 1e12, 121);  // 10 points per decade
    const double rs[] = {1.1, 1.5, 2.0};

    std::vector<double> lf(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) lf[i] = g.log_f(grid[i]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(lf[i]) && !(lf[i] == kInf)) c.positive_increasing = false;
        if (i > 0 && !(lf[i] > lf[i - 1])) c.positive_increasing = false;
    }

    // Per-decade growth of f must not collapse (a bounded f has geometrically
    // shrinking increments).
    auto f_at = [&](std::size_t i) { return std::exp(lf[i]); };
    const std::size_t last = grid.size() - 1;
    const double d_last = f_at(last) - f_at(last - 10);
    const double d_prev = f_at(last - 10) - f_at(last - 20);
    if (!(std::isinf(f_at(last)) || d_last >= 0.5 * d_prev)) c.unbounded = false;

    for (double r : rs) {
        std::vector<double> ratio(grid.size());
        std::vector<double> decay(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ratio[i] = g.log_f_prime(grid[i]) - r * lf[i];
            decay[i] = std::log(grid[i]) + ratio[i];
        }
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(ratio[i] < ratio[i - 1])) c.ratio_decreasing = false;
        for (std::size_t i = grid.size() / 2 + 1; i < grid.size(); ++i)
            if (!(decay[i] < decay[i - 1])) c.decay = false;
    }

    if (!c.positive_increasing) c.failures.emplace_back("generator: f not positive and increasing");
    if (!c.unbounded) c.failures.emplace_back("generator: f appears bounded");
    if (!c.decay) c.failures.emplace_back("generator: s f'/f^r does not decay");
    if (!c.ratio_decreasing) c.failures.emplace_back("generator: f'/f^r not strictly decreasing");
    c.pass = c.failures.empty();
    return c;
}

// --- Ladder ---------------------------------------------------------------

std::vector<double> Ladder::a() const
{
    if (mode == LadderMode::explicit_values) return values;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] * p;
    return out;
}

Ladder Ladder::explicit_a(std::vector<double> a) { return {LadderMode::explicit_values, std::move(a), 1.0}; }

Ladder Ladder::s_times_p(std::vector<double> s, double p) { return {LadderMode::s_times_p, std::move(s), p}; }

Ladder Ladder::default_s(double p) { return s_times_p({0.2, 0.1, 0.05, 0.025, 0.0125}, p); }

// --- MollifierFamily ------------------------------------------------------

MollifierFamily::MollifierFamily(Generator g, ProfilePtr profile, Ladder ladder)
    : gen_(g), profile_(std::move(profile)), ladder_(std::move(ladder)), a_(ladder_.a())
{
    require(profile_ != nullptr, "family needs a profile");
    const double floor_v = gen_.floor_in_V();
    floor_t_ = std::max(profile_->domain_floor(), floor_v > 0.0 ? profile_->inverse(floor_v) : 0.0);
}

double MollifierFamily::log_fV(double t) const
{
    return gen_.log_f_from_log_s(profile_->log_eval(t));
}

double MollifierFamily::log_rho_at(double a, double t) const
{
    const double ls = profile_->log_eval(t);
    return std::log(a) + gen_.log_fprime_over_f_from_log_s(ls) - a * gen_.log_f_from_log_s(ls);
}

double MollifierFamily::rho_at(double a, double t) const
{
    if (t <= floor_t_) return 0.0;
    return std::exp(log_rho_at(a, t));
}

double MollifierFamily::log_rho(std::size_t n, double t) const { return log_rho_at(a(n), t); }

double MollifierFamily::rho(std::size_t n, double t) const { return rho_at(a(n), t); }

double MollifierFamily::log_tail_mass_at(double a, double delta) const
{
    if (!(delta > floor_t_)) throw DomainError("tail mass: delta at or below the domain floor");
    const double lf = log_fV(delta);
    if (std::isnan(lf)) throw DomainError("tail mass: f(V(delta)) <= 0");
    return -a * lf;
}

double MollifierFamily::tail_mass_at(double a, double delta) const
{
    return std::exp(log_tail_mass_at(a, delta));
}

double MollifierFamily::tail_mass(std::size_t n, double delta) const
{
    return tail_mass_at(a(n), delta);
}

double MollifierFamily::sample_radius_at(double a, double delta_min, double q) const
{
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("sample_radius: q must lie in (0,1)");
    const double ly = log_fV(delta_min) - std::log(q) / a;
    if (std::isnan(ly)) throw DomainError("sample_radius: delta_min at or below the domain floor");
    const double r = profile_->inverse_log(gen_.log_inverse_from_log(ly));
    return std::isnan(r) ? kInf : std::max(r, delta_min);
}

double MollifierFamily::sample_radius(std::size_t n, double delta_min, double q) const
{
    return sample_radius_at(a(n), delta_min, q);
}

double MollifierFamily::kappa_at(double a, double t) const
{
    const double ls = profile_->log_eval(t);
    const double v = std::exp(ls);
    return (a + 1.0) * std::exp(gen_.log_fprime_over_f_from_log_s(ls)) - gen_.fpp_over_fp(v);
}

MollifierFamily make_family(Generator g, ProfilePtr profile, Ladder ladder)
{
    const auto a = ladder.a();
    require(!a.empty(), "family: empty ladder");
    for (double v : a) require(v > 0.0, "family: a_n must be positive");
    require(strictly_decreasing(a), "family: a-ladder must be strictly decreasing");
    if (g.kind() == GeneratorKind::log) {
        require(profile->eval(1e6) > 1.0 || std::isinf(profile->eval(1e6)),
                "family: log generator needs a profile range exceeding 1");
    }
    return MollifierFamily(g, std::move(profile), std::move(ladder));
}

// --- verify_family --------------------------------------------------------

MollifierReport verify_family(const MollifierFamily& family, const std::vector<double>& t_grid_in,
                              const std::vector<std::pair<std::size_t, std::size_t>>& n_pairs_in,
                              const std::vector<double>& R_ladder)
{
    require(!t_grid_in.empty() && family.size() > 0 && !R_ladder.empty(),
            "verify_family: empty grid");
    MollifierReport rep;
    const auto& gen = family.generator();
    const auto& prof = family.profile();
    const std::size_t nn = family.size();

    std::vector<double> t_grid;
    for (double t : t_grid_in)
        if (t > family.domain_floor()) t_grid.push_back(t);

    rep.ladder_decreasing = strictly_decreasing(family.a_values());
    for (double v : family.a_values())
        if (!(v > 0.0)) rep.ladder_decreasing = false;

    // Strict decrease in t, on log values to survive underflow.
    for (std::size_t n = 0; n < nn; ++n)
        for (std::size_t i = 1; i < t_grid.size(); ++i)
            if (!(family.log_rho(n, t_grid[i]) < family.log_rho(n, t_grid[i - 1])))
                rep.decreasing_in_t = false;

    auto pairs = n_pairs_in;
    if (pairs.empty())
        for (std::size_t n = 1; n < nn; ++n) pairs.emplace_back(n, n - 1);

    // Ratio monotonicity and the ratio identity. The identity uses direct (linear)
    // evaluation of f and f' so that it checks the log-space kernel.
    for (auto [n, m] : pairs) {
        double prev = -kInf;
        for (double t : t_grid) {
            const double lr = family.log_rho(n, t) - family.log_rho(m, t);
            if (lr < prev) rep.condition_b = false;
            prev = lr;

            const double v = prof.eval(t);
            const double fv = gen.f(v);
            const double fp = gen.f_prime(v);
            const double an = family.a(n);
            const double am = family.a(m);
            const double rn = an * fp / std::pow(fv, an + 1.0);
            const double rm = am * fp / std::pow(fv, am + 1.0);
            const double ident = (an / am) * std::pow(fv, am - an);
            if (!(std::isfinite(rn) && std::isfinite(rm) && rn > 0.0 && rm > 0.0 &&
                  std::isfinite(ident) && std::isnormal(fv)))
                continue;
            const double res = std::abs(rn / rm - ident) / ident;
            rep.ratio_identity_residual = std::max(rep.ratio_identity_residual, res);
            const double res_log = std::abs(std::exp(lr) - ident) / ident;
            rep.ratio_identity_residual = std::max(rep.ratio_identity_residual, res_log);
        }
    }
    rep.ratio_identity = rep.ratio_identity_residual <= kRatioIdentityTol;

    // rho V -> 0: strictly decreasing over the upper third of the grid.
    const std::size_t third = t_grid.size() - t_grid.size() / 3;
    for (std::size_t n = 0; n < nn; ++n) {
        double prev = kInf;
        for (std::size_t i = std::max<std::size_t>(third, 1) - 1; i < t_grid.size(); ++i) {
            const double v = family.log_rho(n, t_grid[i]) + prof.log_eval(t_grid[i]);
            if (!(v < prev)) rep.rhoV_decay = false;
            prev = v;
        }
    }

    // rho_n = a_n g_n(t) with g_n bounded along the ladder, so rho_n -> 0.
    for (double t : t_grid) {
        double gmax = 0.0;
        for (std::size_t n = 0; n < nn; ++n)
            gmax = std::max(gmax, std::exp(family.log_rho(n, t) - std::log(family.a(n))));
        if (!std::isfinite(gmax)) rep.pointwise_to_zero = false;
    }
    if (nn < 2 || !(family.a(nn - 1) < family.a(0))) rep.pointwise_to_zero = false;

    // Tail double limit. log T is affine in a, so the two smallest a give the
    // a -> 0 value exactly up to rounding.
    for (double R : R_ladder) {
        if (!(R > family.domain_floor())) continue;
        TailLimit lim;
        lim.R = R;
        lim.sup = 0.0;
        lim.inf = kInf;
        for (std::size_t n = 0; n < nn; ++n) {
            const double T = family.tail_mass(n, R);
            rep.tails.push_back({n, family.a(n), R, T});
            lim.sup = std::max(lim.sup, T);
            lim.inf = std::min(lim.inf, T);
        }
        if (nn >= 2) {
            const double a1 = family.a(nn - 1);
            const double a2 = family.a(nn - 2);
            const double l1 = family.log_tail_mass_at(a1, R);
            const double l2 = family.log_tail_mass_at(a2, R);
            lim.limit_n = std::exp(l1 - a1 * (l2 - l1) / (a2 - a1));
        } else {
            lim.limit_n = family.tail_mass(0, R);
        }
        rep.tail_limits.push_back(lim);
    }
    rep.double_limit = rep.tail_limits.empty() ? 0.0 : rep.tail_limits.back().limit_n;
    rep.tail_limit_ok = std::abs(rep.double_limit - 1.0) <= kTailLimitTol;

    rep.generator = check_generator(gen);

    if (!rep.ladder_decreasing) rep.failures.emplace_back("monotonicity: a-ladder not strictly decreasing");
    if (!rep.decreasing_in_t) rep.failures.emplace_back("rho_n not strictly decreasing in t");
    if (!rep.condition_b) rep.failures.emplace_back("monotonicity: rho_n/rho_m not non-decreasing in t");
    if (!rep.ratio_identity) rep.failures.emplace_back("ratio identity residual above tolerance");
    if (!rep.rhoV_decay) rep.failures.emplace_back("rho_n V does not decay");
    if (!rep.pointwise_to_zero) rep.failures.emplace_back("rho_n does not vanish pointwise");
    if (!rep.tail_limit_ok) rep.failures.emplace_back("tail double limit differs from 1");
    for (const auto& f : rep.generator.failures) rep.failures.push_back(f);
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace nlab
