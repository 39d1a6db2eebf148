#include <cmath>

#include "nlab/error.hpp"
#include "nlab/simd/kernels.hpp"
#include "nlab/space.hpp"

namespace nlab {

Point heisenberg_mul(const Point& a, const Point& b)
{
    return {a[0] + b[0], a[1] + b[1], (a[2] + b[2]) + 0.5 * (a[0] * b[1] - a[1] * b[0]), 0.0};
}

Point heisenberg_inv(const Point& a) { return {-a[0], -a[1], -a[2], 0.0}; }

double koranyi_gauge(const Point& a)
{
    const double h = a[0] * a[0] + a[1] * a[1];
    return std::pow(h * h + 16.0 * a[2] * a[2], 0.25);
}

namespace {

// Unit gauge ball lies in [-1,1]^2 x [-1/4,1/4].
Point unit_ball_point(VariateSource& v)
{
    for (;;) {
        const Point w{2.0 * v.uniform() - 1.0, 2.0 * v.uniform() - 1.0, 0.5 * v.uniform() - 0.25, 0.0};
        if (koranyi_gauge(w) <= 1.0) return w;
    }
}

Point dilate(const Point& a, double r) { return {r * a[0], r * a[1], r * r * a[2], 0.0}; }

class Heisenberg final : public Space {
public:
    explicit Heisenberg(Measured c) : c_(c), profile_(make_power_profile(4)) {}

    std::string name() const override { return "heisenberg"; }
    std::vector<std::pair<std::string, double>> params() const override { return {}; }
    int chart_dim() const override { return 3; }

    double distance(const Point& x, const Point& y) const override
    {
        return koranyi_gauge(heisenberg_mul(heisenberg_inv(x), y));
    }
    Measured ball_volume(const Point&, double r) const override
    {
        const double r4 = profile_->eval(r);
        return {c_.value * r4, c_.uncertainty * r4, c_.provenance};
    }
    double shell_density(const Point&, double r) const override
    {
        return c_.value * profile_->deriv(r);
    }
    Point sample_ball(const Point& x, double r, VariateSource& v) const override
    {
        return heisenberg_mul(x, dilate(unit_ball_point(v), r));
    }
    // Cone measure: radial projection of a uniform ball point by dilation.
    Point sample_sphere(const Point& x, double r, VariateSource& v) const override
    {
        Point w{};
        double g = 0.0;
        do {
            w = unit_ball_point(v);
            g = koranyi_gauge(w);
        } while (g == 0.0);
        return heisenberg_mul(x, dilate(w, r / g));
    }

    ProfilePtr natural_profile() const override { return profile_; }
    std::optional<Measured> avr() const override { return c_; }
    bool homogeneous() const override { return true; }
    std::optional<int> comparison_dimension() const override { return 4; }
    std::string note() const override
    {
        return "homogeneous gauge metric used in place of the Carnot-Caratheodory distance";
    }

    void ball_box(const Point& x, double r, Point& lo, Point& hi) const override
    {
        const double zr = 0.25 * r * r + 0.5 * std::hypot(x[0], x[1]) * r;
        lo = {x[0] - r, x[1] - r, x[2] - zr, 0.0};
        hi = {x[0] + r, x[1] + r, x[2] + zr, 0.0};
    }
    std::uint64_t count_within(const Point& x, double r, const double* const* coords,
                               std::size_t n) const override
    {
        const double r2 = r * r;
        return simd::kernels().count_koranyi(coords[0], coords[1], coords[2], n, x.data(), r2 * r2);
    }

private:
    Measured c_;
    ProfilePtr profile_;
};

}  // namespace

SpacePtr make_heisenberg(std::uint64_t samples, std::uint64_t seed)
{
    require(samples >= 1000, "heisenberg: too few calibration samples");
    const Heisenberg probe(Measured::exact(1.0));
    const Measured c = ball_volume_mc(probe, Point{}, 1.0, samples, seed);
    return std::make_shared<Heisenberg>(c);
}

}  // namespace nlab
