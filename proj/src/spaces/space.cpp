#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlab/error.hpp"
#include "nlab/space.hpp"

namespace nlab {

std::uint64_t Space::count_within(const Point& x, double r, const double* const* coords,
                                  std::size_t n) const
{
    std::uint64_t count = 0;
    const int d = chart_dim();
    for (std::size_t i = 0; i < n; ++i) {
        Point y{};
        for (int k = 0; k < d; ++k) y[k] = coords[k][i];
        count += distance(x, y) <= r ? 1 : 0;
    }
    return count;
}

double unit_ball_volume(int N)
{
    // omega_N = 2 pi / N omega_{N-2}, exact for the small N used here.
    require(N >= 0, "unit_ball_volume: N must be non-negative");
    double w = N % 2 == 0 ? 1.0 : 2.0;
    for (int k = N % 2 == 0 ? 2 : 3; k <= N; k += 2) w *= 2.0 * std::numbers::pi / k;
    return w;
}

Measured ball_volume_mc(const Space& space, const Point& x, double r, std::uint64_t samples,
                        std::uint64_t seed)
{
    require(samples > 0, "ball_volume_mc: samples must be positive");
    const int d = space.chart_dim();
    Point lo{};
    Point hi{};
    space.ball_box(x, r, lo, hi);
    double box = 1.0;
    for (int k = 0; k < d; ++k) box *= hi[k] - lo[k];

    const std::uint64_t strata = std::uint64_t{1} << d;
    const std::uint64_t per = std::max<std::uint64_t>(1, samples / strata);
    const double sub = box / static_cast<double>(strata);
    constexpr std::size_t kChunk = 4096;

    std::vector<double> rows(static_cast<std::size_t>(d) * kChunk);
    const double* coords[kMaxChartDim] = {};
    for (int k = 0; k < d; ++k) coords[k] = rows.data() + k * kChunk;

    double value = 0.0;
    double var = 0.0;
    for (std::uint64_t j = 0; j < strata; ++j) {
        std::uint64_t hits = 0;
        for (std::uint64_t done = 0; done < per; done += kChunk) {
            const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, per - done));
            VariateBlock block(seed, purpose::ball_volume, j * per + done, n, d);
            for (int k = 0; k < d; ++k) {
                const double half = 0.5 * (hi[k] - lo[k]);
                const double base = lo[k] + (((j >> k) & 1u) ? half : 0.0);
                double* row = rows.data() + k * kChunk;
                for (std::size_t i = 0; i < n; ++i) row[i] = base + half * block(k, i);
            }
            hits += space.count_within(x, r, coords, n);
        }
        const double f = static_cast<double>(hits) / static_cast<double>(per);
        value += sub * f;
        var += sub * sub * f * (1.0 - f) / static_cast<double>(per);
    }
    return {value, std::sqrt(var), Provenance::monte_carlo};
}

std::vector<Point> random_centers(const Space& space, std::size_t count, double scale,
                                  std::uint64_t seed)
{
    std::vector<Point> out;
    out.reserve(count);
    VariateBlock block(seed, purpose::centers, 0, count, 8);
    for (std::size_t i = 0; i < count; ++i) {
        VariateSource v(block, i);
        out.push_back(space.sample_ball(space.base_point(), scale, v));
    }
    return out;
}

std::vector<VolumeRow> ball_volume_table(const Space& space, const std::vector<Point>& centers,
                                         const std::vector<double>& radii)
{
    std::vector<VolumeRow> rows;
    for (const auto& c : centers)
        for (double r : radii) rows.push_back({c, r, space.ball_volume(c, r)});
    return rows;
}

}  // namespace nlab
