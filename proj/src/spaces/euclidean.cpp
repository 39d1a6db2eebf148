#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "nlab/error.hpp"
#include "nlab/simd/kernels.hpp"
#include "nlab/space.hpp"

namespace nlab {
namespace {

class Euclidean final : public Space, public LineChart {
public:
    explicit Euclidean(int N) : N_(N), omega_(unit_ball_volume(N)), profile_(make_power_profile(N)) {}

    std::string name() const override { return "euclidean"; }
    std::vector<std::pair<std::string, double>> params() const override
    {
        return {{"N", static_cast<double>(N_)}};
    }
    int chart_dim() const override { return N_; }

    double distance(const Point& x, const Point& y) const override
    {
        double s = 0.0;
        for (int k = 0; k < N_; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
        return std::sqrt(s);
    }
    Measured ball_volume(const Point&, double r) const override
    {
        return Measured::exact(omega_ * profile_->eval(r));
    }
    double shell_density(const Point&, double r) const override
    {
        return omega_ * profile_->deriv(r);
    }
    Point sample_ball(const Point& x, double r, VariateSource& v) const override
    {
        const double rad = r * std::pow(v.uniform(), 1.0 / N_);
        return sample_sphere(x, rad, v);
    }
    Point sample_sphere(const Point& x, double r, VariateSource& v) const override
    {
        Point y = x;
        if (N_ == 1) {
            y[0] += v.uniform() < 0.5 ? -r : r;
            return y;
        }
        double g[kMaxChartDim];
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int k = 0; k < N_; ++k) {
                g[k] = v.normal();
                norm += g[k] * g[k];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (int k = 0; k < N_; ++k) y[k] += r * g[k] / norm;
        return y;
    }

    ProfilePtr natural_profile() const override { return profile_; }
    std::optional<Measured> avr() const override { return Measured::exact(omega_); }
    bool homogeneous() const override { return true; }
    std::optional<int> comparison_dimension() const override { return N_; }
    const LineChart* line() const override { return N_ == 1 ? this : nullptr; }

    void ball_box(const Point& x, double r, Point& lo, Point& hi) const override
    {
        for (int k = 0; k < N_; ++k) {
            lo[k] = x[k] - r;
            hi[k] = x[k] + r;
        }
    }
    std::uint64_t count_within(const Point& x, double r, const double* const* coords,
                               std::size_t n) const override
    {
        return simd::kernels().count_euclid(coords, N_, n, x.data(), r * r);
    }

    double period() const override { return std::numeric_limits<double>::infinity(); }
    double distance_of_offset(double t) const override { return t; }
    double offset_of_distance(double r) const override { return r; }
    double side_density(double) const override { return 1.0; }

private:
    int N_;
    double omega_;
    ProfilePtr profile_;
};

class Normed final : public Space {
public:
    Normed(int N, double q)
        : N_(N), q_(q), profile_(make_power_profile(N))
    {
        c_ = std::pow(2.0 * std::tgamma(1.0 + 1.0 / q), N) / std::tgamma(1.0 + N / q);
    }

    std::string name() const override { return "normed"; }
    std::vector<std::pair<std::string, double>> params() const override
    {
        return {{"N", static_cast<double>(N_)}, {"q", q_}};
    }
    int chart_dim() const override { return N_; }

    double distance(const Point& x, const Point& y) const override
    {
        double s = 0.0;
        for (int k = 0; k < N_; ++k) s += std::pow(std::abs(x[k] - y[k]), q_);
        return std::pow(s, 1.0 / q_);
    }
    Measured ball_volume(const Point&, double r) const override
    {
        return Measured::exact(c_ * profile_->eval(r));
    }
    double shell_density(const Point&, double r) const override { return c_ * profile_->deriv(r); }

    // Generalized Gaussian coordinates with density ~ exp(-|t|^q): y/||y||_q
    // follows the cone measure, and y/(||y||_q^q + E)^{1/q} with E ~ Exp(1)
    // is uniform in the unit ball.
    Point sample_ball(const Point& x, double r, VariateSource& v) const override
    {
        double y[kMaxChartDim];
        const double s = gen_gauss(y, v);
        const double e = -std::log(v.uniform());
        const double scale = r / std::pow(s + e, 1.0 / q_);
        Point out = x;
        for (int k = 0; k < N_; ++k) out[k] += scale * y[k];
        return out;
    }
    Point sample_sphere(const Point& x, double r, VariateSource& v) const override
    {
        double y[kMaxChartDim];
        double s = 0.0;
        do s = gen_gauss(y, v);
        while (s == 0.0);
        const double scale = r / std::pow(s, 1.0 / q_);
        Point out = x;
        for (int k = 0; k < N_; ++k) out[k] += scale * y[k];
        return out;
    }

    ProfilePtr natural_profile() const override { return profile_; }
    std::optional<Measured> avr() const override { return Measured::exact(c_); }
    bool homogeneous() const override { return true; }
    std::optional<int> comparison_dimension() const override
    {
        return q_ == 2.0 ? std::optional<int>(N_) : std::nullopt;
    }

    void ball_box(const Point& x, double r, Point& lo, Point& hi) const override
    {
        for (int k = 0; k < N_; ++k) {
            lo[k] = x[k] - r;
            hi[k] = x[k] + r;
        }
    }
    std::uint64_t count_within(const Point& x, double r, const double* const* coords,
                               std::size_t n) const override
    {
        return simd::kernels().count_lq(coords, N_, n, x.data(), q_, std::pow(r, q_));
    }

private:
    double gen_gauss(double* y, VariateSource& v) const
    {
        double s = 0.0;
        for (int k = 0; k < N_; ++k) {
            const double g = boost::math::gamma_p_inv(1.0 / q_, v.uniform());
            const double sign = v.uniform() < 0.5 ? -1.0 : 1.0;
            y[k] = sign * std::pow(g, 1.0 / q_);
            s += g;
        }
        return s;
    }

    int N_;
    double q_;
    double c_ = 0.0;
    ProfilePtr profile_;
};

}  // namespace

SpacePtr make_euclidean(int N)
{
    require(N >= 1 && N <= kMaxChartDim, "euclidean: N must lie in [1, 4]");
    return std::make_shared<Euclidean>(N);
}

SpacePtr make_normed(int N, double q)
{
    require(N >= 1 && N <= kMaxChartDim, "normed: N must lie in [1, 4]");
    require(q >= 1.0 && std::isfinite(q), "normed: q must be finite and >= 1");
    return std::make_shared<Normed>(N, q);
}

}  // namespace nlab
