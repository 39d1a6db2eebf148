#include "nlab/volume_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlab/error.hpp"
#include "nlab/quadrature.hpp"

namespace nlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class PowerProfile final : public VolumeProfile {
public:
    explicit PowerProfile(int N) : N_(N) {}

    ProfileKind kind() const override { return ProfileKind::power; }
    std::string name() const override { return "power"; }
    std::vector<std::pair<std::string, double>> params() const override
    {
        return {{"N", static_cast<double>(N_)}};
    }

    double eval(double t) const override
    {
        if (N_ == 1) return t;
        if (N_ == 2) return t * t;
        return std::pow(t, N_);
    }
    double deriv(double t) const override
    {
        if (N_ == 1) return 1.0;
        return N_ * std::pow(t, N_ - 1);
    }
    double inverse(double v) const override
    {
        if (N_ == 1) return v;
        if (N_ == 2) return std::sqrt(v);
        return std::pow(v, 1.0 / N_);
    }
    double log_eval(double t) const override { return N_ * std::log(t); }
    double inverse_log(double lv) const override { return std::exp(lv / N_); }

private:
    int N_;
};

class HyperbolicProfile final : public VolumeProfile {
public:
    HyperbolicProfile(double K, int N)
        : K_(K), N_(N), m_(N - 1), k_(std::sqrt(-K / (N - 1)))
    {
        // Nodes stop where sinh^{m}(k t) approaches the top of double range.
        h_ = std::min(0.25, 0.5 / (k_ * m_));
        t_max_ = 700.0 / (k_ * m_);
        const auto nodes = static_cast<std::size_t>(std::ceil(t_max_ / h_));
        t_max_ = nodes * h_;
        cum_.assign(nodes + 1, 0.0);
        auto s = [this](double r) { return deriv(r); };
        for (std::size_t i = 0; i < nodes; ++i)
            cum_[i + 1] = cum_[i] + quad::gk(s, i * h_, (i + 1) * h_, 1e-14).value;
        log_vmax_ = std::log(cum_.back());
    }

    ProfileKind kind() const override { return ProfileKind::hyperbolic; }
    std::string name() const override { return "hyperbolic"; }
    std::vector<std::pair<std::string, double>> params() const override
    {
        return {{"K", K_}, {"N", static_cast<double>(N_)}};
    }

    double eval(double t) const override
    {
        if (t <= 0.0) return 0.0;
        if (t > t_max_) return std::exp(log_eval(t));
        const auto i = std::min(static_cast<std::size_t>(t / h_), cum_.size() - 1);
        auto s = [this](double r) { return deriv(r); };
        return cum_[i] + quad::gl(s, i * h_, t);
    }

    double deriv(double t) const override
    {
        const double s = std::sinh(k_ * t);
        return m_ == 1 ? s : std::pow(s, m_);
    }

    double log_eval(double t) const override
    {
        if (t <= t_max_) return std::log(eval(t));
        return asymptotic_log(t);
    }

    double inverse(double v) const override
    {
        if (!(v > 0.0)) return 0.0;
        if (std::isinf(v)) return kInf;
        if (v > cum_.back()) return inverse_log(std::log(v));
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), v);
        const auto i = static_cast<std::size_t>(it - cum_.begin());
        // Newton inside the node bracket, falling back to bisection steps.
        double lo = (i - 1) * h_;
        double hi = std::min(i * h_, t_max_);
        double t = lo + (v - cum_[i - 1]) / (cum_[i] - cum_[i - 1]) * (hi - lo);
        for (int it = 0; it < 100; ++it) {
            const double f = eval(t) - v;
            if (std::abs(f) <= 4e-16 * v) return t;
            (f > 0.0 ? hi : lo) = t;
            double next = t - f / deriv(t);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) <= 1e-14 * (1.0 + t) || hi - lo <= 1e-14 * (1.0 + t)) return next;
            t = next;
        }
        return t;
    }

    double inverse_log(double lv) const override
    {
        if (lv <= log_vmax_) return inverse(std::exp(lv));
        return (lv + m_ * std::numbers::ln2 + std::log(m_ * k_)) / (m_ * k_);
    }

private:
    // Leading term of V for large t; relative corrections are below e^{-2 k t}.
    double asymptotic_log(double t) const
    {
        return m_ * k_ * t - m_ * std::numbers::ln2 - std::log(m_ * k_);
    }

    double K_;
    int N_;
    int m_;
    double k_;
    double h_ = 0.0;
    double t_max_ = 0.0;
    double log_vmax_ = 0.0;
    std::vector<double> cum_;
};

class CustomProfile final : public VolumeProfile {
public:
    explicit CustomProfile(CustomProfileFns f) : f_(std::move(f)) {}

    ProfileKind kind() const override { return ProfileKind::custom; }
    std::string name() const override { return f_.name; }
    std::vector<std::pair<std::string, double>> params() const override { return {}; }

    double eval(double t) const override { return f_.eval(t); }
    double deriv(double t) const override { return f_.deriv(t); }
    double inverse(double v) const override
    {
        return f_.inverse ? f_.inverse(v) : VolumeProfile::inverse(v);
    }
    double log_eval(double t) const override
    {
        return f_.log_eval ? f_.log_eval(t) : VolumeProfile::log_eval(t);
    }
    double inverse_log(double lv) const override
    {
        return f_.inverse_log ? f_.inverse_log(lv) : VolumeProfile::inverse_log(lv);
    }

private:
    CustomProfileFns f_;
};

}  // namespace

double VolumeProfile::inverse(double v) const
{
    if (!(v > 0.0)) return 0.0;
    if (std::isinf(v)) return kInf;
    double lo = 0.0;
    double hi = 1.0;
    while (eval(hi) < v) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return kInf;
    }
    return solve_inverse(v, lo, hi);
}

double VolumeProfile::log_eval(double t) const { return std::log(eval(t)); }

double VolumeProfile::inverse_log(double lv) const { return inverse(std::exp(lv)); }

double VolumeProfile::solve_inverse(double v, double lo, double hi) const
{
    while (hi - lo > 1e-14 * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (eval(mid) < v)
            lo = mid;
        else
            hi = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double s = deriv(t);
        if (!(s > 0.0) || !std::isfinite(s)) break;
        const double next = t - (eval(t) - v) / s;
        if (!(next >= lo && next <= hi)) break;
        t = next;
    }
    return t;
}

ProfilePtr make_power_profile(int N)
{
    require(N >= 1, "power profile needs N >= 1");
    return std::make_shared<PowerProfile>(N);
}

ProfilePtr make_hyperbolic_profile(double K, int N)
{
    require(K < 0.0, "hyperbolic profile needs K < 0");
    require(N >= 2, "hyperbolic profile needs N >= 2");
    return std::make_shared<HyperbolicProfile>(K, N);
}

ProfilePtr make_custom_profile(CustomProfileFns fns)
{
    require(static_cast<bool>(fns.eval) && static_cast<bool>(fns.deriv),
            "custom profile needs eval and deriv");
    return std::make_shared<CustomProfile>(std::move(fns));
}

ProfilePtr make_exponential_profile()
{
    CustomProfileFns f;
    f.name = "exp_minus_one";
    f.eval = [](double t) { return std::expm1(t); };
    f.deriv = [](double t) { return std::exp(t); };
    f.inverse = [](double v) { return std::log1p(v); };
    f.log_eval = [](double t) {
        return t > 30.0 ? t + std::log1p(-std::exp(-t)) : std::log(std::expm1(t));
    };
    f.inverse_log = [](double lv) {
        return lv > 0.0 ? lv + std::log1p(std::exp(-lv)) : std::log1p(std::exp(lv));
    };
    return make_custom_profile(std::move(f));
}

ProfileDiagnostics check_profile(const VolumeProfile& profile, const std::vector<double>& grid)
{
    require(!grid.empty(), "check_profile: empty grid");
    ProfileDiagnostics d;
    d.note = "V assumed piecewise C1; S checked by central differences";
    double prev = -kInf;
    for (double t : grid) {
        ProfilePointCheck c;
        c.t = t;
        c.value = profile.eval(t);
        c.derivative = profile.deriv(t);
        c.increasing = c.value > prev && c.derivative > 0.0;
        if (!c.increasing) d.monotonicity_violations.push_back(t);
        prev = c.value;

        // Step on the scale over which V changes by O(1) relative.
        const double scale = c.derivative > 0.0 ? std::min(t, c.value / c.derivative) : t;
        const double h = 1e-5 * (std::isfinite(scale) && scale > 0.0 ? scale : t);
        const double fd = (profile.eval(t + h) - profile.eval(t - h)) / (2.0 * h);
        c.derivative_residual = std::abs(fd - c.derivative) / std::abs(c.derivative);
        c.inverse_residual = std::abs(profile.inverse(c.value) - t) / t;
        if (!std::isfinite(c.derivative_residual)) c.derivative_residual = kInf;
        if (!std::isfinite(c.inverse_residual)) c.inverse_residual = kInf;
        d.max_derivative_residual = std::max(d.max_derivative_residual, c.derivative_residual);
        d.max_inverse_residual = std::max(d.max_inverse_residual, c.inverse_residual);
        d.points.push_back(c);
    }
    d.pass = d.monotonicity_violations.empty() && d.max_derivative_residual <= kProfileDerivTol &&
             d.max_inverse_residual <= kProfileInverseTol;
    return d;
}

}  // namespace nlab
