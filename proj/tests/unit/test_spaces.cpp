#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nlab/error.hpp"
#include "nlab/space.hpp"
#include "oracles.hpp"

using namespace nlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

Point random_point(SequentialStream& rng, int dim, double scale)
{
    Point p{};
    for (int k = 0; k < dim; ++k) p[k] = scale * (2.0 * rng.uniform() - 1.0);
    return p;
}

bool within_sigma(const Measured& a, double b, double k)
{
    return std::abs(a.value - b) <= k * a.uncertainty + 1e-12 * std::abs(b);
}

}  // namespace

TEST_CASE("unit ball volumes", "[spaces]")
{
    CHECK_THAT(unit_ball_volume(1), WithinRel(2.0, 1e-15));
    CHECK_THAT(unit_ball_volume(2), WithinRel(pi, 1e-15));
    CHECK_THAT(unit_ball_volume(3), WithinRel(4.0 * pi / 3.0, 1e-15));
    CHECK_THAT(unit_ball_volume(4), WithinRel(pi * pi / 2.0, 1e-15));
}

TEST_CASE("closed-form ball volumes", "[spaces]")
{
    auto e2 = make_euclidean(2);
    CHECK_THAT(e2->ball_volume(Point{3.0, -1.0}, 1.0).value, WithinRel(pi, 1e-15));
    CHECK(e2->ball_volume(Point{}, 1.0).provenance == Provenance::exact);

    // l^q unit ball: (2 Gamma(1 + 1/q))^N / Gamma(1 + N/q).
    for (double q : {1.0, 1.5, 3.0}) {
        auto s = make_normed(2, q);
        const double c = std::pow(2.0 * std::tgamma(1.0 + 1.0 / q), 2) / std::tgamma(1.0 + 2.0 / q);
        CHECK_THAT(s->ball_volume(Point{}, 2.0).value, WithinRel(4.0 * c, 1e-12));
    }
    CHECK_THAT(make_normed(2, 1.0)->ball_volume(Point{}, 1.0).value, WithinRel(2.0, 1e-14));
    CHECK_THROWS_AS(make_normed(2, 0.5), InvalidParameter);

    auto w = make_warped_line(make_power_profile(2));
    for (double r : {0.1, 1.0, 7.0}) CHECK_THAT(w->ball_volume(Point{0.3}, r).value, WithinRel(2.0 * r * r, 1e-14));

    auto c = make_circle(1.0);
    CHECK_THAT(c->diameter(), WithinRel(pi, 1e-15));
    CHECK_THAT(c->ball_volume(Point{0.5}, 1.0).value, WithinRel(2.0, 1e-15));
    CHECK_THAT(c->ball_volume(Point{0.5}, 10.0).value, WithinRel(2.0 * pi, 1e-15));
    CHECK_THROWS_AS(make_circle(0.0), InvalidParameter);
}

TEST_CASE("warped line rejects a non-subadditive inverse", "[spaces]")
{
    // V(t) = sqrt(t) has inverse s^2, which is superadditive.
    CustomProfileFns f;
    f.name = "sqrt";
    f.eval = [](double t) { return std::sqrt(t); };
    f.deriv = [](double t) { return 0.5 / std::sqrt(t); };
    f.inverse = [](double v) { return v * v; };
    CHECK_THROWS_AS(make_warped_line(make_custom_profile(f)), InvalidParameter);
    CHECK_NOTHROW(make_warped_line(make_exponential_profile()));
    CHECK_NOTHROW(make_warped_line(make_hyperbolic_profile(-1.0, 2)));
}

TEST_CASE("metric axioms on random triples", "[spaces][property]")
{
    std::vector<SpacePtr> spaces{make_euclidean(1), make_euclidean(3), make_normed(3, 1.0), make_normed(2, 4.0),
                                 make_warped_line(make_power_profile(2)), make_circle(2.0),
                                 make_heisenberg(100'000, 1)};
    SequentialStream rng(3, purpose::property);
    for (const auto& s : spaces) {
        INFO(s->name());
        const int d = s->chart_dim();
        const double scale = s->name() == "circle" ? 6.0 : 3.0;
        for (int k = 0; k < 2000; ++k) {
            Point x = random_point(rng, d, scale), y = random_point(rng, d, scale), z = random_point(rng, d, scale);
            if (s->name() == "circle") {
                x[0] = std::abs(x[0]);
                y[0] = std::abs(y[0]);
                z[0] = std::abs(z[0]);
            }
            const double dxy = s->distance(x, y);
            CHECK(dxy >= 0.0);
            CHECK_THAT(dxy, WithinAbs(s->distance(y, x), 1e-12 * (1.0 + dxy)));
            CHECK(dxy <= s->distance(x, z) + s->distance(z, y) + 1e-12 * (1.0 + dxy));
            CHECK(s->distance(x, x) <= 1e-15);
        }
    }
}

TEST_CASE("Heisenberg gauge: left invariance and homogeneity", "[spaces][property]")
{
    auto h = make_heisenberg(2'000'000, 5);
    SequentialStream rng(4, purpose::property);
    for (int k = 0; k < 1000; ++k) {
        const Point g = random_point(rng, 3, 2.0), x = random_point(rng, 3, 2.0), y = random_point(rng, 3, 2.0);
        const double d = h->distance(x, y);
        CHECK_THAT(h->distance(heisenberg_mul(g, x), heisenberg_mul(g, y)), WithinRel(d, 1e-12));
        const double lam = 0.5 + 2.0 * rng.uniform();
        const Point dx{lam * x[0], lam * x[1], lam * lam * x[2]};
        const Point dy{lam * y[0], lam * y[1], lam * lam * y[2]};
        CHECK_THAT(h->distance(dx, dy), WithinRel(lam * d, 1e-12));
    }
    const Point e = heisenberg_mul(Point{0.3, -0.2, 0.7}, heisenberg_inv(Point{0.3, -0.2, 0.7}));
    CHECK(koranyi_gauge(e) < 1e-15);

    // c_K against pi^2 / 8.
    const auto c = h->avr();
    REQUIRE(c.has_value());
    CHECK(c->provenance == Provenance::monte_carlo);
    CHECK(within_sigma(*c, oracle::koranyi_unit_ball(), 4.0));
    CHECK(h->ball_volume(Point{}, 2.0).value / h->ball_volume(Point{}, 1.0).value == Catch::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("homogeneous spaces: ball volume does not depend on the centre", "[spaces][property]")
{
    std::vector<SpacePtr> spaces{make_euclidean(2), make_normed(3, 1.5), make_heisenberg(100'000, 9)};
    SequentialStream rng(5, purpose::property);
    for (const auto& s : spaces) {
        INFO(s->name());
        CHECK(s->homogeneous());
        const int d = s->chart_dim();
        const auto base = ball_volume_mc(*s, s->base_point(), 1.3, 400'000, 21);
        for (int k = 0; k < 3; ++k) {
            const Point x = random_point(rng, d, 5.0);
            CHECK(s->ball_volume(x, 1.3).value == s->ball_volume(s->base_point(), 1.3).value);
            const auto m = ball_volume_mc(*s, x, 1.3, 400'000, 22 + k);
            CHECK(std::abs(m.value - base.value) <= 3.0 * std::hypot(m.uncertainty, base.uncertainty));
        }
        const auto exact = s->ball_volume(s->base_point(), 1.3);
        CHECK(std::abs(base.value - exact.value) <= 4.0 * std::hypot(base.uncertainty, exact.uncertainty));
    }
}

TEST_CASE("uniform ball and sphere sampling", "[spaces][statistical]")
{
    // Fraction of B_1 inside B_{1/2} is 2^{-Q}.
    struct Case {
        SpacePtr s;
        double q;
    };
    std::vector<Case> cases{{make_euclidean(2), 2.0}, {make_euclidean(3), 3.0}, {make_normed(2, 1.0), 2.0},
                            {make_heisenberg(100'000, 2), 4.0}};
    for (const auto& c : cases) {
        INFO(c.s->name());
        const Point x = c.s->chart_dim() == 3 ? Point{0.4, -1.0, 2.0} : Point{0.4, -1.0};
        const std::size_t n = 200'000;
        VariateBlock block(77, purpose::property, 0, n, 8);
        std::size_t inner = 0;
        double max_sphere_dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            VariateSource v(block, i);
            const Point y = c.s->sample_ball(x, 1.0, v);
            const double d = c.s->distance(x, y);
            CHECK(d <= 1.0 + 1e-12);
            inner += d < 0.5;
            if (i < 2000) {
                const Point z = c.s->sample_sphere(x, 0.7, v);
                max_sphere_dev = std::max(max_sphere_dev, std::abs(c.s->distance(x, z) - 0.7));
            }
        }
        const double p = std::pow(2.0, -c.q);
        CHECK(std::abs(inner / static_cast<double>(n) - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
        CHECK(max_sphere_dev < 1e-9);
    }
}

TEST_CASE("count_within agrees with a direct loop", "[spaces]")
{
    std::vector<SpacePtr> spaces{make_euclidean(3), make_normed(3, 1.0), make_normed(3, 2.5), make_heisenberg(100'000, 3)};
    SequentialStream rng(8, purpose::property);
    const std::size_t n = 1001;
    std::vector<double> rows[3];
    for (auto& r : rows) {
        r.resize(n);
        for (auto& v : r) v = 4.0 * rng.uniform() - 2.0;
    }
    const double* coords[3] = {rows[0].data(), rows[1].data(), rows[2].data()};
    for (const auto& s : spaces) {
        INFO(s->name());
        const Point c{0.1, 0.2, -0.3};
        for (double r : {0.5, 1.0, 1.7}) {
            std::uint64_t direct = 0;
            for (std::size_t i = 0; i < n; ++i) direct += s->distance(c, Point{rows[0][i], rows[1][i], rows[2][i]}) <= r;
            CHECK(s->count_within(c, r, coords, n) == direct);
        }
    }
}

TEST_CASE("Bishop-Gromov checks", "[spaces]")
{
    const auto grid = log_grid(1e-2, 1e3, 16);
    auto e3 = check_bgi(*make_euclidean(3), *make_power_profile(3), grid);
    CHECK(e3.pass);
    CHECK(e3.violations.empty());
    for (const auto& r : e3.ratios) CHECK_THAT(r.value, WithinRel(4.0 * pi / 3.0, 1e-13));

    auto V = make_exponential_profile();
    auto w = check_bgi(*make_warped_line(V), *V, log_grid(1e-2, 100.0, 16));
    CHECK(w.pass);
    for (const auto& r : w.ratios) CHECK_THAT(r.value, WithinRel(2.0, 1e-12));

    // Wrong profile: pi r^2 / r is increasing.
    auto bad = check_bgi(*make_euclidean(2), *make_power_profile(1), grid);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.violations.empty());

    auto h = make_heisenberg(1'000'000, 2024);
    CHECK(check_bgi(*h, *h->natural_profile(), grid).pass);
}

TEST_CASE("AVR, density and volume bound", "[spaces]")
{
    const auto big = log_grid(1e2, 1e5, 6);
    const auto small = std::vector<double>{1e-2, 1e-3, 1e-4};
    auto e2 = make_euclidean(2);
    CHECK_THAT(estimate_avr(*e2, *e2->natural_profile(), big).value.value, WithinRel(pi, 1e-12));
    auto c = make_circle(1.0);
    CHECK(estimate_avr(*c, *c->natural_profile(), big).value.value == 0.0);

    auto w = make_warped_line(make_power_profile(2));
    for (const Point x : {Point{0.0}, Point{3.5}, Point{-10.0}})
        CHECK_THAT(estimate_density(*w, *w->natural_profile(), x, small).value.value, WithinRel(2.0, 1e-12));
    CHECK_THAT(estimate_avr(*w, *w->natural_profile(), big).value.value, WithinRel(2.0, 1e-12));

    // estimate_avr <= estimate_density under BGI.
    std::vector<SpacePtr> bgi{e2, make_euclidean(3), w, make_heisenberg(1'000'000, 2024)};
    for (const auto& s : bgi) {
        INFO(s->name());
        const auto avr = estimate_avr(*s, *s->natural_profile(), big).value;
        for (const Point& x : random_centers(*s, 4, 5.0, 11)) {
            const auto th = estimate_density(*s, *s->natural_profile(), x, small).value;
            CHECK(avr.value <= th.value + 3.0 * (avr.uncertainty + th.uncertainty) + 1e-12 * th.value);
        }
    }

    CHECK_THAT(check_volume_bound(*e2, *e2->natural_profile(), log_grid(1, 1e4, 9)).k, WithinRel(pi, 1e-12));
    CHECK_THAT(check_volume_bound(*w, *w->natural_profile(), log_grid(1, 1e4, 9)).k, WithinRel(2.0, 1e-12));
    auto h = make_heisenberg(1'000'000, 2024);
    const auto hk = check_volume_bound(*h, *h->natural_profile(), log_grid(1, 1e4, 9));
    CHECK(hk.bounded);
    CHECK(hk.centers >= 16);
    CHECK_THAT(hk.k, WithinRel(h->avr()->value, 1e-12));
}

TEST_CASE("tail mollifier mass", "[spaces]")
{
    // Euclidean N = 1, a = 0.5, R = 1: int_{|z|>1} 0.5 |z|^{-1.5} dz = 2.
    auto e1 = make_euclidean(1);
    MollifierFamily f1(Generator::power(1.0), make_power_profile(1), Ladder::explicit_a({0.5}));
    CHECK_THAT(tail_mollifier_mass(*e1, f1, 0, Point{0.7}, 1.0).value, WithinRel(2.0, 1e-9));

    // Warped line over t^2, alpha = 1, V(R) = 4, a = 0.1: 2 * 4^{-0.1}.
    auto V2 = make_power_profile(2);
    auto w = make_warped_line(V2);
    MollifierFamily fw(Generator::power(1.0), V2, Ladder::explicit_a({0.1}));
    const double m = tail_mollifier_mass(*w, fw, 0, Point{0.0}, 2.0).value;
    CHECK_THAT(m, WithinRel(2.0 * std::pow(4.0, -0.1), 1e-9));
    CHECK_THAT(m, WithinAbs(1.7411, 1e-4));

    // Homogeneous Euclidean spaces: omega_N T(R).
    for (int N = 2; N <= 3; ++N) {
        auto e = make_euclidean(N);
        auto fam = make_family(Generator::power(1.0 / N), make_power_profile(N), Ladder::default_s(1.0));
        for (double R : {0.3, 1.0, 30.0})
            for (std::size_t n = 0; n < fam.size(); n += 2)
                CHECK_THAT(tail_mollifier_mass(*e, fam, n, Point{1.0, 2.0, 3.0}, R).value,
                           WithinRel(unit_ball_volume(N) * fam.tail_mass(n, R), 1e-9));
    }

    // Circle: nothing beyond the diameter.
    auto c = make_circle(1.0);
    auto fc = make_family(Generator::power(1.0), make_power_profile(1), Ladder::default_s(1.0));
    CHECK(tail_mollifier_mass(*c, fc, 0, Point{0.2}, 4.0).value == 0.0);
}

TEST_CASE("ball volume table rows", "[spaces]")
{
    auto e2 = make_euclidean(2);
    const auto rows = ball_volume_table(*e2, {Point{}, Point{1.0, 1.0}}, {1.0, 2.0});
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) CHECK_THAT(r.volume.value, WithinRel(pi * r.r * r.r, 1e-15));
}
