#pragma once
// Metric measure spaces: distance, ball volumes, measure-uniform sampling,
// plus the geometric validators built on them.

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlab/measured.hpp"
#include "nlab/mollifier.hpp"
#include "nlab/rng.hpp"
#include "nlab/volume_profile.hpp"

namespace nlab {

inline constexpr int kMaxChartDim = 4;
using Point = std::array<double, kMaxChartDim>;

/// Geometry of a one-dimensional chart whose coordinate is the measure
/// (arc length or length). Offsets t >= 0 are measured along the chart.
class LineChart {
public:
    virtual ~LineChart() = default;
    /// +inf for the line, circumference for the circle.
    virtual double period() const = 0;
    /// Distance between chart points t apart, for 0 <= t <= period/2.
    virtual double distance_of_offset(double t) const = 0;
    /// Inverse of distance_of_offset.
    virtual double offset_of_distance(double r) const = 0;
    /// d(offset)/d(distance): measure of a one-sided shell per unit radius.
    virtual double side_density(double r) const = 0;
};

class Space {
public:
    virtual ~Space() = default;

    virtual std::string name() const = 0;
    virtual std::vector<std::pair<std::string, double>> params() const = 0;
    virtual int chart_dim() const = 0;

    virtual double distance(const Point& x, const Point& y) const = 0;
    /// m(B_r(x)): exact where closed form, otherwise with its Monte Carlo error.
    virtual Measured ball_volume(const Point& x, double r) const = 0;
    /// d/dr m(B_r(x)).
    virtual double shell_density(const Point& x, double r) const = 0;
    /// Point distributed uniformly (w.r.t. m) in B_r(x).
    virtual Point sample_ball(const Point& x, double r, VariateSource& v) const = 0;
    /// Point on the sphere of radius r about x, distributed by the
    /// disintegration of m along distance spheres.
    virtual Point sample_sphere(const Point& x, double r, VariateSource& v) const = 0;

    virtual Point base_point() const { return Point{}; }
    virtual double diameter() const { return std::numeric_limits<double>::infinity(); }
    virtual ProfilePtr natural_profile() const = 0;
    /// Asymptotic volume ratio against the natural profile, when known.
    virtual std::optional<Measured> avr() const = 0;
    /// Ball volumes independent of the centre.
    virtual bool homogeneous() const = 0;
    /// Dimension N for which the comparison bound 2 N omega_N / p applies.
    virtual std::optional<int> comparison_dimension() const { return std::nullopt; }
    /// Note carried into reports (model substitutions and similar).
    virtual std::string note() const { return {}; }

    virtual const LineChart* line() const { return nullptr; }

    /// Axis-aligned box containing B_r(x).
    virtual void ball_box(const Point& x, double r, Point& lo, Point& hi) const = 0;
    /// Number of the n structure-of-arrays points within distance r of x.
    virtual std::uint64_t count_within(const Point& x, double r, const double* const* coords,
                                       std::size_t n) const;
};

using SpacePtr = std::shared_ptr<const Space>;

/// Volume of the Euclidean unit ball in dimension N.
double unit_ball_volume(int N);

SpacePtr make_euclidean(int N);
SpacePtr make_normed(int N, double q);
/// Rejects profiles whose inverse fails subadditivity on 10^4 random pairs.
SpacePtr make_warped_line(ProfilePtr V, std::uint64_t seed = 7);
SpacePtr make_circle(double radius);
/// c_K from `samples` stratified rejection samples.
SpacePtr make_heisenberg(std::uint64_t samples = 10'000'000, std::uint64_t seed = 2024);

/// Heisenberg group law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+(xy'-yx')/2).
Point heisenberg_mul(const Point& a, const Point& b);
Point heisenberg_inv(const Point& a);
/// ((x^2+y^2)^2 + 16 z^2)^{1/4}.
double koranyi_gauge(const Point& a);

/// Stratified rejection estimate of m(B_r(x)) from the space's bounding box:
/// 2^chart_dim equal sub-boxes, binomial variance per stratum.
Measured ball_volume_mc(const Space& space, const Point& x, double r, std::uint64_t samples,
                        std::uint64_t seed);

// --- validators ------------------------------------------------------------

struct BgiViolation {
    double r = 0.0;
    double R = 0.0;
    double ratio_r = 0.0;
    double ratio_R = 0.0;
};

struct BgiReport {
    std::vector<double> r;
    std::vector<Measured> ratios;
    std::vector<BgiViolation> violations;
    Measured avr_estimate;
    Measured density_estimate;
    double k_bound = 0.0;
    bool pass = false;
};

inline constexpr double kBgiExactTol = 1e-9;
inline constexpr double kBgiSigmas = 3.0;

BgiReport check_bgi(const Space& space, const VolumeProfile& V, const std::vector<double>& r_grid);

struct Estimate {
    Measured value;
    bool low_precision = false;
};

Estimate estimate_avr(const Space& space, const VolumeProfile& V, const std::vector<double>& r_ladder);
Estimate estimate_density(const Space& space, const VolumeProfile& V, const Point& x,
                          const std::vector<double>& r_ladder_down);

struct VolumeBound {
    double k = 0.0;
    std::vector<double> decade_max;  // running max of the ratio per decade of r
    bool bounded = true;
    std::size_t centers = 0;
};

VolumeBound check_volume_bound(const Space& space, const VolumeProfile& V,
                               const std::vector<double>& r_grid, std::size_t centers = 16,
                               std::uint64_t seed = 11);

/// int over the complement of B_R(x) of rho_n(d(x,y)) dm(y), by the
/// integration-by-parts form int_R^inf (m(B_t) - m(B_R)) (-rho_n'(t)) dt.
Measured tail_mollifier_mass(const Space& space, const MollifierFamily& family, std::size_t n,
                             const Point& x, double R);

struct VolumeRow {
    Point center{};
    double r = 0.0;
    Measured volume;
};

/// Rows for the ball-volume CSV table.
std::vector<VolumeRow> ball_volume_table(const Space& space, const std::vector<Point>& centers,
                                         const std::vector<double>& radii);

/// Random centres for validators: uniform in the ball of radius `scale`
/// about the base point.
std::vector<Point> random_centers(const Space& space, std::size_t count, double scale,
                                  std::uint64_t seed);

}  // namespace nlab
