#pragma once
// Ladder driver, extrapolation to a -> 0, predicted limits and the
// tail-mass validator chain.

#include <optional>
#include <string>
#include <vector>

#include "nlab/energy.hpp"
#include "nlab/measured.hpp"
#include "nlab/mollifier.hpp"
#include "nlab/space.hpp"
#include "nlab/test_function.hpp"
#include "nlab/volume_profile.hpp"

namespace nlab {

enum class EnergyMethod { automatic, quadrature, monte_carlo };

std::string to_string(EnergyMethod m);

struct LadderOptions {
    EnergyMethod method = EnergyMethod::automatic;
    EnergyOptions energy;
};

/// Quadrature on one-dimensional charts, Monte Carlo otherwise.
EnergyMethod resolve_method(const Space& space, EnergyMethod m);

/// Energies for every ladder entry. The coarsest level is checked first:
/// quadrature must be stable under a 100x tighter tolerance, Monte Carlo
/// must agree with its own first half within 5 sigma. Failure throws
/// HypothesisViolation.
std::vector<EnergyEstimate> run_ladder(const Space& space, const TestFunction& u,
                                       const MollifierFamily& family, const LadderOptions& opts);

enum class ExtrapolationModel { automatic, affine, quadratic, log_affine };

std::string to_string(ExtrapolationModel m);
ExtrapolationModel extrapolation_model_from_string(const std::string& s);

struct Extrapolation {
    ExtrapolationModel model = ExtrapolationModel::affine;  // after resolving automatic
    Measured limit;
    std::vector<double> coefficients;  // c0 + c1 a (+ c2 a^2); log-space for log_affine
    double fit_sigma = 0.0;  // sqrt of the intercept variance from the fit alone
    double bias = 0.0;  // added near-part / model contributions
    double chi2_per_dof = 0.0;
    bool weighted = false;
};

/// Weighted least squares of y against a. Monte Carlo inputs are weighted
/// 1/sigma^2; otherwise unit weights with the residual variance as scale.
/// automatic picks quadratic with five or more points, affine below.
Extrapolation extrapolate(const std::vector<double>& a, const std::vector<Measured>& y,
                          ExtrapolationModel model);
Extrapolation extrapolate(const std::vector<EnergyEstimate>& ladder, ExtrapolationModel model);

struct Prediction {
    Measured avr;
    bool avr_exact = true;
    Measured norm;  // ||u||_p^p
    Measured raw;  // 2 AVR ||u||_p^p
    std::optional<double> s_factor;  // raw -> s-normalized
    std::optional<Measured> s_normalized;
    std::optional<int> comparison_dimension;
    std::optional<Measured> rcd_bound_raw;  // 2 omega_N ||u||_p^p
    std::optional<Measured> rcd_bound_s;  // 2 N omega_N / p ||u||_p^p for alpha = 1/N
};

/// Throws DomainError when the space has no AVR.
Prediction predict_limit(const Space& space, const TestFunction& u, const MollifierFamily& family);

struct ValidatorSummary {
    bool profile = true;
    bool family = true;
    std::optional<bool> bgi;  // empty when waived (finite diameter)
    double k = 0.0;
    bool volume_bound = true;
    bool pass = true;
    std::vector<std::string> failures;
    ProfileDiagnostics profile_report;
    MollifierReport family_report;
    std::optional<BgiReport> bgi_report;
    VolumeBound bound_report;
};

ValidatorSummary run_validators(const Space& space, const MollifierFamily& family);

struct CheckOptions {
    double tol = 0.02;
    double abs_floor = 0.05;
    ExtrapolationModel model = ExtrapolationModel::automatic;
    LadderOptions ladder;
    bool skip_validate = false;
};

struct AsymptoticReport {
    std::optional<ValidatorSummary> validators;
    std::vector<EnergyEstimate> ladder;
    bool ladder_decreasing = false;
    Extrapolation extrapolation;
    Prediction prediction;
    double tolerance = 0.0;
    double abs_floor = 0.0;
    double deviation = 0.0;  // |limit - predicted|
    double relative_deviation = 0.0;  // deviation / predicted (0 when predicted is 0)
    double allowed = 0.0;
    std::optional<bool> rcd_ok;  // limit <= (1 + tol) rcd bound + uncertainty
    bool rcd_equality = false;  // within tolerance of the bound
    bool ran = false;  // false when validators failed
    bool pass = false;
    std::vector<std::string> notes;
};

/// Validators (unless skipped), ladder, extrapolation and prediction.
/// pass iff |limit - predicted| <= tol predicted + uncertainty, or
/// |limit| <= abs_floor when the prediction is 0.
AsymptoticReport check_ms(const Space& space, const TestFunction& u, const MollifierFamily& family,
                          const CheckOptions& opts);

struct TailCell {
    std::size_t center = 0;
    double R = 0.0;
    std::size_t n = 0;
    double a = 0.0;
    Measured tail;
};

struct TailRowLimit {
    double R = 0.0;
    Measured limit_n;  // a -> 0 at fixed R, base point
};

struct TailColumnLimit {
    std::size_t n = 0;
    double a = 0.0;
    double at_largest_R = 0.0;  // the R -> inf reading at fixed n
};

struct RegionACell {
    double R = 0.0;
    std::size_t n = 0;
    double a = 0.0;
    Measured I;
};

struct SupCell {
    double R = 0.0;
    double C = 0.0;  // sup over centres and n of the tail mass
};

struct Assumption1Options {
    std::vector<Point> centers;  // first is used for the limits; empty: base point
    std::vector<double> R_ladder;
    std::vector<std::size_t> n_ladder;  // empty: all
    std::optional<TestFunction> u;  // enables the region-A table
    EnergyOptions energy;
};

struct Assumption1Report {
    std::vector<TailCell> table;
    std::vector<TailRowLimit> rows;
    std::vector<TailColumnLimit> columns;
    Measured limit_n_then_R;  // lim_R lim_n
    double limit_R_then_n = 0.0;  // lim_n lim_R
    std::optional<Measured> avr;
    double deviation_from_avr = 0.0;
    bool centers_agree = true;
    std::vector<RegionACell> region_a;
    bool region_a_decays = true;
    std::vector<SupCell> sup;
    bool C_bounded = true;
    bool C_nonincreasing = true;
};

Assumption1Report validate_assumption1(const Space& space, const MollifierFamily& family,
                                       const Assumption1Options& opts);

}  // namespace nlab
