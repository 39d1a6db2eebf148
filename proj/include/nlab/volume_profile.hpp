#pragma once
// Reference volume functions V with shell density S = V' and inverse.

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nlab {

enum class ProfileKind { power, hyperbolic, custom };

class VolumeProfile {
public:
    virtual ~VolumeProfile() = default;

    virtual ProfileKind kind() const = 0;
    virtual std::string name() const = 0;
    /// Named parameters, as they appear in configs and reports.
    virtual std::vector<std::pair<std::string, double>> params() const = 0;

    /// V(t) for t >= 0; +inf once the value leaves double range.
    virtual double eval(double t) const = 0;
    /// S(t) = V'(t).
    virtual double deriv(double t) const = 0;
    /// V^{-1}(v); +inf for v = +inf.
    virtual double inverse(double v) const;

    /// log V(t), finite even where V overflows.
    virtual double log_eval(double t) const;
    /// V^{-1}(exp(lv)) without forming exp(lv).
    virtual double inverse_log(double lv) const;

    /// Smallest t at which the profile is meant to be used (0 unless restricted).
    double domain_floor() const { return floor_; }
    void set_domain_floor(double f) { floor_ = f; }

protected:
    /// Bracketed bisection to width 1e-14 (1+t), then two Newton steps.
    double solve_inverse(double v, double lo, double hi) const;

private:
    double floor_ = 0.0;
};

using ProfilePtr = std::shared_ptr<const VolumeProfile>;

/// V(t) = t^N.
ProfilePtr make_power_profile(int N);

/// V(t) = int_0^t sinh^{N-1}(r sqrt(-K/(N-1))) dr.
ProfilePtr make_hyperbolic_profile(double K, int N);

struct CustomProfileFns {
    std::string name = "custom";
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::function<double(double)> inverse;  // optional
    std::function<double(double)> log_eval;  // optional
    std::function<double(double)> inverse_log;  // optional
};

ProfilePtr make_custom_profile(CustomProfileFns fns);

/// V(t) = e^t - 1.
ProfilePtr make_exponential_profile();

struct ProfilePointCheck {
    double t = 0.0;
    double value = 0.0;
    double derivative = 0.0;
    bool increasing = true;  // V(t) > V(previous t) and S(t) > 0
    double derivative_residual = 0.0;  // relative, central difference vs S
    double inverse_residual = 0.0;  // relative, |V^{-1}(V(t)) - t| / t
};

struct ProfileDiagnostics {
    std::vector<ProfilePointCheck> points;
    std::vector<double> monotonicity_violations;  // grid t where V failed to increase
    double max_derivative_residual = 0.0;
    double max_inverse_residual = 0.0;
    bool pass = false;
    std::string note;
};

inline constexpr double kProfileDerivTol = 1e-6;
inline constexpr double kProfileInverseTol = 1e-10;

ProfileDiagnostics check_profile(const VolumeProfile& profile, const std::vector<double>& grid);

}  // namespace nlab
