#pragma once

#include <cmath>
#include <string_view>

namespace nlab {

/// How a number was obtained.
enum class Provenance { exact, quadrature, monte_carlo };

constexpr std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::quadrature: return "quadrature";
    case Provenance::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

/// Combines two provenances; the less certain one wins.
constexpr Provenance weaker(Provenance a, Provenance b)
{
    return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}

/// A value with its one-sigma uncertainty (standard error for Monte Carlo,
/// error estimate for quadrature, zero when exact).
struct Measured {
    double value = 0.0;
    double uncertainty = 0.0;
    Provenance provenance = Provenance::exact;

    static Measured exact(double v) { return {v, 0.0, Provenance::exact}; }

    double relative_uncertainty() const
    {
        return value != 0.0 ? uncertainty / std::abs(value) : 0.0;
    }
};

inline Measured operator*(const Measured& a, double s)
{
    return {a.value * s, a.uncertainty * std::abs(s), a.provenance};
}

inline Measured operator*(double s, const Measured& a) { return a * s; }

/// Product with first-order (uncorrelated) error propagation.
inline Measured operator*(const Measured& a, const Measured& b)
{
    const double v = a.value * b.value;
    const double e = std::hypot(a.uncertainty * b.value, b.uncertainty * a.value);
    return {v, e, weaker(a.provenance, b.provenance)};
}

}  // namespace nlab
