#pragma once
// Nonlocal energy E_n(u) = iint |u(x) - u(y)|^p rho_n(d(x,y)) dm(x) dm(y).

#include <cstdint>
#include <optional>

#include "nlab/measured.hpp"
#include "nlab/mollifier.hpp"
#include "nlab/space.hpp"
#include "nlab/test_function.hpp"

namespace nlab {

struct EnergyParams {
    std::size_t n = 0;
    double a = 0.0;
    double r0 = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double R = 0.0;
    Point x0{};
};

struct EnergyEstimate {
    double value = 0.0;
    double stat_stderr = 0.0;  // Monte Carlo standard error
    double quad_error = 0.0;  // quadrature error estimate
    double model_uncertainty = 0.0;  // from estimated volume constants
    double near_part = 0.0;
    double far_part = 0.0;
    double deterministic_bias_bound = 0.0;
    bool partial = false;  // quadrature tolerance not reached
    Provenance provenance = Provenance::quadrature;
    EnergyParams params;
    /// Estimate from the first half of the sample blocks (Monte Carlo only).
    std::optional<Measured> first_half;

    double uncertainty() const { return stat_stderr + quad_error + model_uncertainty + deterministic_bias_bound; }
    Measured measured() const { return {value, uncertainty(), provenance}; }
};

struct EnergyOptions {
    std::optional<double> r0;  // near/far cutoff; default from the tail rule
    double tol = 1e-10;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool swap_roles = false;
};

/// r0 with T(r0) = 0.99 T(1e-3 * support radius).
double default_r0(const MollifierFamily& family, std::size_t n, const TestFunction& u);

/// Quadrature in (x, displacement) on spaces with a one-dimensional chart.
EnergyEstimate energy_quadrature_1d(const Space& space, const TestFunction& u,
                                    const MollifierFamily& family, std::size_t n,
                                    const EnergyOptions& opts = {});
EnergyEstimate energy_quadrature_1d_at(const Space& space, const TestFunction& u,
                                       const MollifierFamily& family, double a,
                                       const EnergyOptions& opts = {});

/// Importance-sampled Monte Carlo: anchor uniform on the support, radius
/// from the exact tail law beyond r0 and a power-law proposal below it.
EnergyEstimate energy_mc(const Space& space, const TestFunction& u, const MollifierFamily& family,
                         std::size_t n, const EnergyOptions& opts);

struct Decomposition {
    Measured I;  // d(x,y) < R
    Measured II;  // d(y,x0) > 2 d(x,x0) or < d(x,x0)/2, d(x,y) >= R
    Measured III;  // the rest
    EnergyEstimate total;
    double max_partition_residual = 0.0;  // per block, relative
};

Decomposition decompose_energy(const Space& space, const TestFunction& u,
                               const MollifierFamily& family, std::size_t n, double R,
                               const Point& x0, const EnergyOptions& opts);

}  // namespace nlab
