#pragma once
// Radial mollifier families built from a generator f and a volume profile:
//   rho_n(t) = a_n f'(V(t)) / f(V(t))^{a_n + 1},
// with tail mass int_delta^inf S rho_n = f(V(delta))^{-a_n}.
// Everything is evaluated through logarithms so that huge V and tiny a_n
// stay representable.

#include <optional>
#include <string>
#include <vector>

#include "nlab/volume_profile.hpp"

namespace nlab {

enum class GeneratorKind { power, exp, log };

class Generator {
public:
    static Generator power(double alpha);
    static Generator exponential();
    static Generator logarithmic();

    GeneratorKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::string name() const;

    double f(double s) const;
    double f_prime(double s) const;
    double f_inverse(double y) const;

    double log_f(double s) const;
    double log_f_prime(double s) const;

    /// log f(s) given log s.
    double log_f_from_log_s(double ls) const;
    /// log(f'(s)/f(s)) given log s.
    double log_fprime_over_f_from_log_s(double ls) const;
    /// f''(s)/f'(s).
    double fpp_over_fp(double s) const;
    /// log f^{-1}(exp(ly)).
    double log_inverse_from_log(double ly) const;

    /// Smallest admissible value of s = V(t): f > 0 strictly above it.
    double floor_in_V() const { return kind_ == GeneratorKind::log ? 1.0 : 0.0; }

    /// Factor that turns E_n into the s-normalized energy when a_n = s p.
    std::optional<double> s_normalization(double p) const;

private:
    GeneratorKind kind_ = GeneratorKind::power;
    double alpha_ = 1.0;
};

struct GeneratorCheck {
    bool positive_increasing = true;
    bool unbounded = true;
    bool decay = true;  // s f'(s) / f(s)^r -> 0
    bool ratio_decreasing = true;  // f'(s) / f(s)^r strictly decreasing
    bool pass = true;
    std::vector<std::string> failures;
};

/// Grid test of the generator conditions on 12 decades of s, r in {1.1, 1.5, 2}.
GeneratorCheck check_generator(const Generator& g);

enum class LadderMode { explicit_values, s_times_p };

struct Ladder {
    LadderMode mode = LadderMode::explicit_values;
    std::vector<double> values;  // as given: a_n, or s_n for s_times_p
    double p = 1.0;

    std::vector<double> a() const;
    static Ladder explicit_a(std::vector<double> a);
    static Ladder s_times_p(std::vector<double> s, double p);
    /// s in {0.2, 0.1, 0.05, 0.025, 0.0125}.
    static Ladder default_s(double p);
};

class MollifierFamily {
public:
    /// No ladder validation; use make_family for the checked constructor.
    MollifierFamily(Generator g, ProfilePtr profile, Ladder ladder);

    const Generator& generator() const { return gen_; }
    const VolumeProfile& profile() const { return *profile_; }
    const ProfilePtr& profile_ptr() const { return profile_; }
    const Ladder& ladder() const { return ladder_; }
    std::size_t size() const { return a_.size(); }
    double a(std::size_t n) const { return a_.at(n); }
    const std::vector<double>& a_values() const { return a_; }

    /// Smallest t where the family is defined (V^{-1} of the generator floor).
    double domain_floor() const { return floor_t_; }

    /// log f(V(t)).
    double log_fV(double t) const;

    double rho(std::size_t n, double t) const;
    double log_rho(std::size_t n, double t) const;
    /// Same kernel for an arbitrary exponent a.
    double rho_at(double a, double t) const;
    double log_rho_at(double a, double t) const;

    /// f(V(delta))^{-a_n}.
    double tail_mass(std::size_t n, double delta) const;
    double tail_mass_at(double a, double delta) const;
    double log_tail_mass_at(double a, double delta) const;

    /// Radius r >= delta_min with P(r >= t) = T(t) / T(delta_min). May be +inf.
    double sample_radius(std::size_t n, double delta_min, double q) const;
    double sample_radius_at(double a, double delta_min, double q) const;

    /// kappa(t) with rho'(t) = -S(t) rho(t) kappa(t).
    double kappa_at(double a, double t) const;

private:
    Generator gen_;
    ProfilePtr profile_;
    Ladder ladder_;
    std::vector<double> a_;
    double floor_t_ = 0.0;
};

/// Checked constructor: a-ladder strictly decreasing and positive, generator
/// domain reachable by the profile.
MollifierFamily make_family(Generator g, ProfilePtr profile, Ladder ladder);

struct TailRow {
    std::size_t n = 0;
    double a = 0.0;
    double R = 0.0;
    double tail = 0.0;
};

struct TailLimit {
    double R = 0.0;
    double sup = 0.0;
    double inf = 0.0;
    double limit_n = 0.0;  // extrapolated to a -> 0
};

struct MollifierReport {
    bool ladder_decreasing = true;
    bool decreasing_in_t = true;
    bool condition_b = true;
    double ratio_identity_residual = 0.0;
    bool ratio_identity = true;
    bool rhoV_decay = true;
    bool pointwise_to_zero = true;
    std::vector<TailRow> tails;
    std::vector<TailLimit> tail_limits;
    double double_limit = 0.0;
    bool tail_limit_ok = true;
    GeneratorCheck generator;
    bool pass = true;
    std::vector<std::string> failures;
};

inline constexpr double kRatioIdentityTol = 1e-12;
inline constexpr double kTailLimitTol = 1e-3;

/// Checks the radial-type conditions on grids. n_pairs lists (n, m) with n > m;
/// empty means all consecutive pairs.
MollifierReport verify_family(const MollifierFamily& family, const std::vector<double>& t_grid,
                              const std::vector<std::pair<std::size_t, std::size_t>>& n_pairs,
                              const std::vector<double>& R_ladder);

/// Log-spaced grid of `count` points from lo to hi.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace nlab
