#include <catch_amalgamated.hpp>

#include <cmath>

#include "nlab/error.hpp"
#include "nlab/mollifier.hpp"
#include "nlab/rng.hpp"
#include "nlab/volume_profile.hpp"

using namespace nlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("power profile values", "[profile]")
{
    auto v2 = make_power_profile(2);
    CHECK(v2->eval(3.0) == 9.0);
    CHECK(v2->deriv(3.0) == 6.0);
    auto v1 = make_power_profile(1);
    CHECK(v1->eval(5.0) == 5.0);
    CHECK(v1->deriv(5.0) == 1.0);
    CHECK_THAT(make_power_profile(4)->inverse(16.0), WithinRel(2.0, 1e-15));
    CHECK_THROWS_AS(make_power_profile(0), InvalidParameter);
}

TEST_CASE("power profile is exactly homogeneous", "[profile][property]")
{
    SequentialStream rng(1, purpose::property);
    for (int N = 1; N <= 4; ++N) {
        auto V = make_power_profile(N);
        for (int k = 0; k < 200; ++k) {
            const double a = std::exp(8.0 * (rng.uniform() - 0.5));
            const double t = std::exp(8.0 * (rng.uniform() - 0.5));
            CHECK_THAT(V->eval(a * t), WithinRel(std::pow(a, N) * V->eval(t), 4e-16 * N));
        }
    }
}

TEST_CASE("hyperbolic profile against closed forms", "[profile]")
{
    auto h2 = make_hyperbolic_profile(-1.0, 2);
    CHECK_THAT(h2->eval(1.0), WithinAbs(std::cosh(1.0) - 1.0, 1e-12));
    CHECK_THAT(h2->eval(1.0), WithinAbs(0.54308, 1e-5));
    CHECK_THAT(h2->eval(1e-3) / 1e-6, WithinRel(0.5, 1e-6));
    CHECK_THAT(h2->inverse(h2->eval(2.5)), WithinAbs(2.5, 1e-9));

    // K = -1, N = 2: V = cosh t - 1, to 1e-8 (relative where V > 1).
    double prev = 0.0;
    for (double t : log_grid(1e-4, 60.0, 400)) {
        const double v = h2->eval(t);
        CHECK(std::abs(v - (std::cosh(t) - 1.0)) <= 1e-8 * std::max(1.0, v));
        CHECK(v > prev);
        prev = v;
    }

    // K = -1, N = 3: sinh^2(t/sqrt2) integrates to sinh(sqrt2 t)/(2 sqrt2) - t/2.
    auto h3 = make_hyperbolic_profile(-1.0, 3);
    for (double t : log_grid(1e-2, 40.0, 60)) {
        const double c = std::sinh(std::sqrt(2.0) * t) / (2.0 * std::sqrt(2.0)) - t / 2.0;
        CHECK(std::abs(h3->eval(t) - c) <= 1e-8 * std::max(1.0, c));
    }

    CHECK_THROWS_AS(make_hyperbolic_profile(0.0, 2), InvalidParameter);
    CHECK_THROWS_AS(make_hyperbolic_profile(1.0, 2), InvalidParameter);
    CHECK_THROWS_AS(make_hyperbolic_profile(-1.0, 1), InvalidParameter);
}

TEST_CASE("every profile has positive shell density and a consistent inverse", "[profile][property]")
{
    std::vector<ProfilePtr> profiles{make_power_profile(1), make_power_profile(3), make_hyperbolic_profile(-1.0, 2),
                                     make_hyperbolic_profile(-2.0, 4), make_exponential_profile()};
    for (const auto& V : profiles) {
        INFO(V->name());
        const auto grid = log_grid(1e-3, 50.0, 80);
        for (double t : grid) {
            CHECK(V->deriv(t) > 0.0);
            CHECK_THAT(V->inverse(V->eval(t)), WithinRel(t, 1e-10));
            CHECK_THAT(V->log_eval(t), WithinAbs(std::log(V->eval(t)), 1e-12 * std::max(1.0, std::abs(std::log(V->eval(t))))));
        }
        const auto d = check_profile(*V, grid);
        CHECK(d.pass);
        CHECK(d.monotonicity_violations.empty());
    }
}

TEST_CASE("check_profile examples", "[profile]")
{
    std::vector<double> g;
    for (double t = 0.1; t <= 100.0; t *= 1.5) g.push_back(t);
    CHECK(check_profile(*make_power_profile(3), g).pass);
    CHECK(check_profile(*make_hyperbolic_profile(-1.0, 3), log_grid(1e-2, 30.0, 40)).pass);

    CustomProfileFns bad;
    bad.name = "sine";
    bad.eval = [](double t) { return std::sin(t); };
    bad.deriv = [](double t) { return std::cos(t); };
    const auto d = check_profile(*make_custom_profile(bad), log_grid(0.1, 20.0, 50));
    CHECK_FALSE(d.pass);
    CHECK_FALSE(d.monotonicity_violations.empty());

    CHECK_THROWS_AS(check_profile(*make_power_profile(2), {}), InvalidParameter);
}

TEST_CASE("exponential profile stays finite in log space", "[profile]")
{
    auto V = make_exponential_profile();
    CHECK_THAT(V->eval(1.0), WithinRel(std::expm1(1.0), 1e-15));
    CHECK(std::isinf(V->eval(1000.0)));
    CHECK_THAT(V->log_eval(1000.0), WithinRel(1000.0, 1e-15));
    CHECK_THAT(V->inverse_log(1000.0), WithinRel(1000.0, 1e-12));
}
