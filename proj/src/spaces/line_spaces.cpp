#include <cmath>
#include <numbers>

#include "nlab/error.hpp"
#include "nlab/space.hpp"

namespace nlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class WarpedLine final : public Space, public LineChart {
public:
    explicit WarpedLine(ProfilePtr V) : V_(std::move(V)) {}

    std::string name() const override { return "warped_line"; }
    std::vector<std::pair<std::string, double>> params() const override { return V_->params(); }
    int chart_dim() const override { return 1; }

    double distance(const Point& x, const Point& y) const override
    {
        return V_->inverse(std::abs(x[0] - y[0]));
    }
    Measured ball_volume(const Point&, double r) const override
    {
        return Measured::exact(2.0 * V_->eval(r));
    }
    double shell_density(const Point&, double r) const override { return 2.0 * V_->deriv(r); }
    Point sample_ball(const Point& x, double r, VariateSource& v) const override
    {
        Point y = x;
        y[0] += (2.0 * v.uniform() - 1.0) * V_->eval(r);
        return y;
    }
    Point sample_sphere(const Point& x, double r, VariateSource& v) const override
    {
        Point y = x;
        y[0] += v.uniform() < 0.5 ? -V_->eval(r) : V_->eval(r);
        return y;
    }

    ProfilePtr natural_profile() const override { return V_; }
    std::optional<Measured> avr() const override { return Measured::exact(2.0); }
    bool homogeneous() const override { return true; }
    const LineChart* line() const override { return this; }

    void ball_box(const Point& x, double r, Point& lo, Point& hi) const override
    {
        lo[0] = x[0] - V_->eval(r);
        hi[0] = x[0] + V_->eval(r);
    }

    double period() const override { return kInf; }
    double distance_of_offset(double t) const override { return V_->inverse(t); }
    double offset_of_distance(double r) const override { return V_->eval(r); }
    double side_density(double r) const override { return V_->deriv(r); }

private:
    ProfilePtr V_;
};

class Circle final : public Space, public LineChart {
public:
    explicit Circle(double radius)
        : rho_(radius), P_(2.0 * std::numbers::pi * radius), profile_(make_power_profile(1))
    {
    }

    std::string name() const override { return "circle"; }
    std::vector<std::pair<std::string, double>> params() const override { return {{"radius", rho_}}; }
    int chart_dim() const override { return 1; }

    // Chart coordinate is arc length in [0, 2 pi radius).
    double distance(const Point& x, const Point& y) const override
    {
        const double d = std::fmod(std::abs(x[0] - y[0]), P_);
        return std::min(d, P_ - d);
    }
    Measured ball_volume(const Point&, double r) const override
    {
        return Measured::exact(std::min(2.0 * r, P_));
    }
    double shell_density(const Point&, double r) const override { return r < 0.5 * P_ ? 2.0 : 0.0; }
    Point sample_ball(const Point& x, double r, VariateSource& v) const override
    {
        Point y = x;
        y[0] = wrap(x[0] + (2.0 * v.uniform() - 1.0) * std::min(r, 0.5 * P_));
        return y;
    }
    Point sample_sphere(const Point& x, double r, VariateSource& v) const override
    {
        const double rr = std::min(r, 0.5 * P_);
        Point y = x;
        y[0] = wrap(x[0] + (v.uniform() < 0.5 ? -rr : rr));
        return y;
    }

    double diameter() const override { return 0.5 * P_; }
    ProfilePtr natural_profile() const override { return profile_; }
    std::optional<Measured> avr() const override { return Measured::exact(0.0); }
    bool homogeneous() const override { return true; }
    const LineChart* line() const override { return this; }

    void ball_box(const Point&, double, Point& lo, Point& hi) const override
    {
        lo[0] = 0.0;
        hi[0] = P_;
    }

    double period() const override { return P_; }
    double distance_of_offset(double t) const override { return std::min(t, P_ - t); }
    double offset_of_distance(double r) const override { return r; }
    double side_density(double r) const override { return r < 0.5 * P_ ? 1.0 : 0.0; }

private:
    double wrap(double s) const
    {
        const double w = std::fmod(s, P_);
        return w < 0.0 ? w + P_ : w;
    }

    double rho_;
    double P_;
    ProfilePtr profile_;
};

}  // namespace

SpacePtr make_warped_line(ProfilePtr V, std::uint64_t seed)
{
    require(V != nullptr, "warped line needs a profile");
    // Subadditivity of V^{-1} is the triangle inequality of this metric.
    SequentialStream rng(seed, purpose::property);
    for (int i = 0; i < 10'000; ++i) {
        const double a = std::pow(10.0, -4.0 + 8.0 * rng.uniform());
        const double b = std::pow(10.0, -4.0 + 8.0 * rng.uniform());
        const double lhs = V->inverse(a + b);
        const double rhs = V->inverse(a) + V->inverse(b);
        if (lhs > rhs * (1.0 + 1e-10))
            throw InvalidParameter("warped line: profile inverse is not subadditive");
    }
    return std::make_shared<WarpedLine>(std::move(V));
}

SpacePtr make_circle(double radius)
{
    require(radius > 0.0 && std::isfinite(radius), "circle: radius must be positive");
    return std::make_shared<Circle>(radius);
}

}  // namespace nlab
