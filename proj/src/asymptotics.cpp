#include "nlab/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nlab/error.hpp"

namespace nlab {
namespace {

constexpr double kStableRel = 1e-6;
constexpr double kHalfSigmas = 5.0;
constexpr double kAgreeSigmas = 3.0;

bool same_profile(const VolumeProfile& a, const VolumeProfile& b)
{
    return a.name() == b.name() && a.params() == b.params();
}

// Solves the k x k system in place by Gaussian elimination with partial
// pivoting; also returns the inverse.
bool solve_normal(std::array<std::array<double, 3>, 3> A, std::array<double, 3> b, int k,
                  std::array<double, 3>& x, std::array<std::array<double, 3>, 3>& inv)
{
    std::array<std::array<double, 3>, 3> I{};
    for (int i = 0; i < k; ++i) I[i][i] = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (!(std::abs(A[piv][c]) > 0.0)) return false;
        std::swap(A[c], A[piv]);
        std::swap(I[c], I[piv]);
        std::swap(b[c], b[piv]);
        for (int r = 0; r < k; ++r) {
            if (r == c) continue;
            const double m = A[r][c] / A[c][c];
            for (int j = 0; j < k; ++j) {
                A[r][j] -= m * A[c][j];
                I[r][j] -= m * I[c][j];
            }
            b[r] -= m * b[c];
        }
    }
    for (int i = 0; i < k; ++i) {
        x[i] = b[i] / A[i][i];
        for (int j = 0; j < k; ++j) inv[i][j] = I[i][j] / A[i][i];
    }
    return true;
}

void check_coarsest(const Space& space, const TestFunction& u, const MollifierFamily& fam,
                    EnergyMethod method, const EnergyOptions& eo, const EnergyEstimate& e0)
{
    if (method == EnergyMethod::quadrature) {
        EnergyOptions fine = eo;
        fine.tol = eo.tol * 1e-2;
        const EnergyEstimate e1 = energy_quadrature_1d(space, u, fam, 0, fine);
        if (!(std::abs(e1.value - e0.value) <= kStableRel * std::abs(e1.value) + 1e-12))
            throw HypothesisViolation("coarsest level unstable under refinement: " + std::to_string(e0.value) +
                                      " vs " + std::to_string(e1.value));
        return;
    }
    if (!e0.first_half) return;
    const Measured& h = *e0.first_half;
    if (!(std::abs(h.value - e0.value) <= kHalfSigmas * h.uncertainty))
        throw HypothesisViolation("coarsest level unstable under sample doubling: first half " +
                                  std::to_string(h.value) + " vs " + std::to_string(e0.value));
}

}  // namespace

std::string to_string(EnergyMethod m)
{
    switch (m) {
    case EnergyMethod::automatic: return "auto";
    case EnergyMethod::quadrature: return "quadrature";
    case EnergyMethod::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

std::string to_string(ExtrapolationModel m)
{
    switch (m) {
    case ExtrapolationModel::automatic: return "auto";
    case ExtrapolationModel::affine: return "affine";
    case ExtrapolationModel::quadratic: return "quadratic";
    case ExtrapolationModel::log_affine: return "log_affine";
    }
    return "unknown";
}

ExtrapolationModel extrapolation_model_from_string(const std::string& s)
{
    if (s == "auto") return ExtrapolationModel::automatic;
    if (s == "affine") return ExtrapolationModel::affine;
    if (s == "quadratic") return ExtrapolationModel::quadratic;
    if (s == "log_affine") return ExtrapolationModel::log_affine;
    throw InvalidParameter("unknown extrapolation model: " + s);
}

EnergyMethod resolve_method(const Space& space, EnergyMethod m)
{
    if (m != EnergyMethod::automatic) return m;
    return space.line() ? EnergyMethod::quadrature : EnergyMethod::monte_carlo;
}

std::vector<EnergyEstimate> run_ladder(const Space& space, const TestFunction& u,
                                       const MollifierFamily& family, const LadderOptions& opts)
{
    require(family.size() > 0, "run_ladder: empty ladder");
    const EnergyMethod method = resolve_method(space, opts.method);
    if (method == EnergyMethod::quadrature)
        require(space.line() != nullptr, "run_ladder: quadrature needs a one-dimensional chart");

    // A generator floor makes the kernel mass blow up at d = floor; pairs
    // straddling the support boundary at that distance always exist.
    const double fl = family.domain_floor();
    if (fl > 0.0) {
        const double a = family.a(0);
        const double t1 = family.log_tail_mass_at(a, fl * (1.0 + 1e-4));
        const double t2 = family.log_tail_mass_at(a, fl * (1.0 + 1e-8));
        if (t2 > t1 + 1.0)
            throw HypothesisViolation("energy diverges at the coarsest level: kernel mass is not integrable at d = " +
                                      std::to_string(fl));
    }

    std::vector<EnergyEstimate> out;
    out.reserve(family.size());
    for (std::size_t n = 0; n < family.size(); ++n) {
        EnergyEstimate e = method == EnergyMethod::quadrature
                               ? energy_quadrature_1d(space, u, family, n, opts.energy)
                               : energy_mc(space, u, family, n, opts.energy);
        if (n == 0) check_coarsest(space, u, family, method, opts.energy, e);
        out.push_back(std::move(e));
    }
    return out;
}

Extrapolation extrapolate(const std::vector<double>& a, const std::vector<Measured>& y,
                          ExtrapolationModel model)
{
    require(a.size() == y.size(), "extrapolate: size mismatch");
    require(a.size() >= 3, "extrapolate: need at least three ladder points");
    for (std::size_t i = 1; i < a.size(); ++i)
        if (!(a[i] < a[i - 1])) throw InvalidParameter("extrapolate: ladder must be strictly decreasing");
    for (double v : a)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("extrapolate: ladder values must be positive");

    if (model == ExtrapolationModel::automatic)
        model = a.size() >= 5 ? ExtrapolationModel::quadratic : ExtrapolationModel::affine;
    const int k = model == ExtrapolationModel::quadratic ? 3 : 2;

    Extrapolation ex;
    ex.model = model;
    Provenance prov = Provenance::exact;
    bool mc = false;
    for (const auto& m : y) {
        prov = weaker(prov, m.provenance);
        mc = mc || m.provenance == Provenance::monte_carlo;
    }

    const bool logs = model == ExtrapolationModel::log_affine;
    if (logs) {
        bool all_zero = true;
        for (const auto& m : y) all_zero = all_zero && m.value == 0.0;
        if (all_zero) {
            ex.limit = {0.0, 0.0, prov};
            ex.coefficients = {-std::numeric_limits<double>::infinity(), 0.0};
            return ex;
        }
        for (const auto& m : y)
            if (!(m.value > 0.0)) throw InvalidParameter("extrapolate: log_affine needs positive values");
    }

    const std::size_t N = a.size();
    const double scale = a.front();
    std::vector<double> z(N), w(N, 1.0);
    for (std::size_t i = 0; i < N; ++i) {
        z[i] = logs ? std::log(y[i].value) : y[i].value;
        if (mc) {
            const double s = logs ? y[i].uncertainty / y[i].value : y[i].uncertainty;
            if (!(s > 0.0)) throw InvalidParameter("extrapolate: Monte Carlo point without uncertainty");
            w[i] = 1.0 / (s * s);
        }
    }
    ex.weighted = mc;

    std::array<std::array<double, 3>, 3> A{};
    std::array<double, 3> b{};
    for (std::size_t i = 0; i < N; ++i) {
        const double x = a[i] / scale;
        const std::array<double, 3> row{1.0, x, x * x};
        for (int r = 0; r < k; ++r) {
            b[r] += w[i] * row[r] * z[i];
            for (int c = 0; c < k; ++c) A[r][c] += w[i] * row[r] * row[c];
        }
    }
    std::array<double, 3> c{};
    std::array<std::array<double, 3>, 3> inv{};
    if (!solve_normal(A, b, k, c, inv)) throw InvalidParameter("extrapolate: singular design");

    double rss = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = a[i] / scale;
        const double fit = c[0] + c[1] * x + (k == 3 ? c[2] * x * x : 0.0);
        rss += w[i] * (z[i] - fit) * (z[i] - fit);
    }
    const double dof = static_cast<double>(N) - k;
    double var0 = inv[0][0];
    if (mc) {
        ex.chi2_per_dof = dof > 0 ? rss / dof : 0.0;
        var0 *= std::max(1.0, ex.chi2_per_dof);
    } else {
        ex.chi2_per_dof = dof > 0 ? rss / dof : 0.0;
        var0 *= ex.chi2_per_dof;
    }
    ex.fit_sigma = std::sqrt(std::max(0.0, var0));

    ex.coefficients.assign(c.begin(), c.begin() + k);
    for (int i = 1; i < k; ++i) ex.coefficients[i] /= std::pow(scale, i);
    if (logs) {
        const double v = std::exp(c[0]);
        ex.fit_sigma *= v;
        ex.limit = {v, ex.fit_sigma, prov};
    } else {
        ex.limit = {c[0], ex.fit_sigma, prov};
    }
    return ex;
}

Extrapolation extrapolate(const std::vector<EnergyEstimate>& ladder, ExtrapolationModel model)
{
    std::vector<double> a;
    std::vector<Measured> y;
    double bias = 0.0;
    for (const auto& e : ladder) {
        a.push_back(e.params.a);
        // The statistical part drives the weights; systematic parts are added after the fit.
        const double s = e.provenance == Provenance::monte_carlo ? e.stat_stderr : e.quad_error;
        y.push_back({e.value, s, e.provenance});
        bias = std::max(bias, e.deterministic_bias_bound + e.model_uncertainty);
    }
    Extrapolation ex = extrapolate(a, y, model);
    ex.bias = bias;
    ex.limit.uncertainty += bias;
    return ex;
}

Prediction predict_limit(const Space& space, const TestFunction& u, const MollifierFamily& family)
{
    Prediction pr;
    const auto natural = space.natural_profile();
    if (same_profile(*natural, family.profile())) {
        const auto avr = space.avr();
        if (!avr) throw DomainError("predict_limit: AVR unavailable for " + space.name());
        pr.avr = *avr;
        pr.avr_exact = avr->provenance == Provenance::exact;
    } else {
        const Estimate e = estimate_avr(space, family.profile(), log_grid(1e3, 1e5, 5));
        if (e.low_precision) throw DomainError("predict_limit: AVR estimate too imprecise");
        pr.avr = e.value;
        pr.avr_exact = e.value.provenance == Provenance::exact && !std::isfinite(space.diameter());
        if (std::isfinite(space.diameter())) pr.avr_exact = true;
    }
    pr.norm = norm_p_pow(space, u);
    pr.raw = 2.0 * (pr.avr * pr.norm);
    pr.s_factor = family.generator().s_normalization(u.p);
    if (pr.s_factor) pr.s_normalized = pr.raw * *pr.s_factor;
    pr.comparison_dimension = space.comparison_dimension();
    if (pr.comparison_dimension) {
        const int N = *pr.comparison_dimension;
        const double w = unit_ball_volume(N);
        pr.rcd_bound_raw = 2.0 * w * pr.norm;
        pr.rcd_bound_s = (2.0 * N * w / u.p) * pr.norm;
    }
    return pr;
}

ValidatorSummary run_validators(const Space& space, const MollifierFamily& family)
{
    ValidatorSummary s;
    const VolumeProfile& V = family.profile();
    // Grids stop where V leaves double range.
    const double t_max = V.inverse(1e300);
    const double lo = std::max(1e-3, 2.0 * family.domain_floor());
    s.profile_report = check_profile(V, log_grid(lo, std::min(lo * 1e6, t_max), 61));
    s.profile = s.profile_report.pass;
    if (!s.profile) s.failures.push_back("profile: check_profile failed");

    // Radii where the smallest a_n still leaves a visible tail.
    const double a_min = family.a_values().back();
    std::vector<double> R;
    for (double r : {1.0, 10.0, 100.0, 1000.0})
        if (r > family.domain_floor() && a_min * family.log_fV(r) <= 1.0) R.push_back(r);
    if (R.empty()) R.push_back(std::max(1.0, 2.0 * family.domain_floor()));
    s.family_report = verify_family(family, log_grid(lo, std::min(lo * 1e7, t_max), 57), {}, R);
    s.family = s.family_report.pass;
    for (const auto& f : s.family_report.failures) s.failures.push_back("family: " + f);

    if (!std::isfinite(space.diameter())) {
        s.bgi_report = check_bgi(space, V, log_grid(1e-2, std::min(1e3, t_max), 16));
        s.bgi = s.bgi_report->pass;
        if (!*s.bgi)
            s.failures.push_back("bgi: " + std::to_string(s.bgi_report->violations.size()) + " violations");
    }

    s.bound_report = check_volume_bound(space, V, log_grid(1.0, std::min(1e4, t_max), 9));
    s.k = s.bound_report.k;
    s.volume_bound = s.bound_report.bounded && std::isfinite(s.k);
    if (!s.volume_bound) s.failures.push_back("volume bound: k grows across decades");

    s.pass = s.profile && s.family && s.bgi.value_or(true) && s.volume_bound;
    return s;
}

AsymptoticReport check_ms(const Space& space, const TestFunction& u, const MollifierFamily& family,
                          const CheckOptions& opts)
{
    AsymptoticReport rep;
    rep.tolerance = opts.tol;
    rep.abs_floor = opts.abs_floor;
    if (!opts.skip_validate) {
        rep.validators = run_validators(space, family);
        if (!rep.validators->pass) {
            rep.notes.push_back("validators failed; ladder not run");
            return rep;
        }
    }
    if (!space.note().empty()) rep.notes.push_back(space.note());
    rep.notes.push_back("finiteness is tested at the coarsest level only");

    rep.prediction = predict_limit(space, u, family);
    rep.ladder = run_ladder(space, u, family, opts.ladder);
    rep.ran = true;
    rep.ladder_decreasing = true;
    for (std::size_t i = 1; i < rep.ladder.size(); ++i)
        if (!(rep.ladder[i].value < rep.ladder[i - 1].value)) rep.ladder_decreasing = false;

    rep.extrapolation = extrapolate(rep.ladder, opts.model);
    const Measured& lim = rep.extrapolation.limit;
    const Measured& pred = rep.prediction.raw;
    rep.deviation = std::abs(lim.value - pred.value);
    if (pred.value == 0.0) {
        rep.allowed = opts.abs_floor;
        rep.relative_deviation = 0.0;
    } else {
        rep.allowed = opts.tol * std::abs(pred.value) + lim.uncertainty + pred.uncertainty;
        rep.relative_deviation = rep.deviation / std::abs(pred.value);
    }
    rep.pass = rep.deviation <= rep.allowed;

    if (rep.prediction.rcd_bound_raw) {
        const Measured& b = *rep.prediction.rcd_bound_raw;
        // Same allowance as the pass rule: the extrapolation carries model error.
        rep.rcd_ok = lim.value <= b.value + opts.tol * b.value + lim.uncertainty + b.uncertainty;
        rep.rcd_equality = std::abs(lim.value - b.value) <= opts.tol * b.value + lim.uncertainty + b.uncertainty;
    }
    return rep;
}

Assumption1Report validate_assumption1(const Space& space, const MollifierFamily& family,
                                       const Assumption1Options& opts)
{
    require(!opts.R_ladder.empty(), "validate_assumption1: empty R ladder");
    std::vector<Point> centers = opts.centers;
    if (centers.empty()) centers.push_back(space.base_point());
    std::vector<std::size_t> ns = opts.n_ladder;
    if (ns.empty())
        for (std::size_t n = 0; n < family.size(); ++n) ns.push_back(n);
    require(ns.size() >= 3, "validate_assumption1: need at least three ladder levels");

    Assumption1Report rep;
    const std::size_t nc = centers.size();
    const std::size_t nR = opts.R_ladder.size();
    // tails[c][iR][in]
    std::vector<std::vector<std::vector<Measured>>> tails(
        nc, std::vector<std::vector<Measured>>(nR, std::vector<Measured>(ns.size())));
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t i = 0; i < nR; ++i)
            for (std::size_t j = 0; j < ns.size(); ++j) {
                const Measured t = tail_mollifier_mass(space, family, ns[j], centers[c], opts.R_ladder[i]);
                tails[c][i][j] = t;
                rep.table.push_back({c, opts.R_ladder[i], ns[j], family.a(ns[j]), t});
            }

    std::vector<double> a;
    for (auto n : ns) a.push_back(family.a(n));
    for (std::size_t i = 0; i < nR; ++i) {
        const Extrapolation ex = extrapolate(a, tails[0][i], ExtrapolationModel::log_affine);
        rep.rows.push_back({opts.R_ladder[i], ex.limit});
    }
    rep.limit_n_then_R = rep.rows.back().limit_n;

    std::vector<Measured> col;
    for (std::size_t j = 0; j < ns.size(); ++j) {
        rep.columns.push_back({ns[j], a[j], tails[0][nR - 1][j].value});
        col.push_back(tails[0][nR - 1][j]);
    }
    rep.limit_R_then_n = extrapolate(a, col, ExtrapolationModel::log_affine).limit.value;

    rep.avr = space.avr();
    if (rep.avr) rep.deviation_from_avr = std::abs(rep.limit_n_then_R.value - rep.avr->value);

    if (space.homogeneous()) {
        for (std::size_t c = 1; c < nc; ++c)
            for (std::size_t i = 0; i < nR; ++i)
                for (std::size_t j = 0; j < ns.size(); ++j) {
                    const Measured& x = tails[0][i][j];
                    const Measured& y = tails[c][i][j];
                    const double tol = kAgreeSigmas * std::hypot(x.uncertainty, y.uncertainty) +
                                       1e-9 * std::max(std::abs(x.value), std::abs(y.value));
                    if (!(std::abs(x.value - y.value) <= tol)) rep.centers_agree = false;
                }
    }

    for (std::size_t i = 0; i < nR; ++i) {
        double C = 0.0;
        double err = 0.0;
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t j = 0; j < ns.size(); ++j) {
                if (tails[c][i][j].value > C) {
                    C = tails[c][i][j].value;
                    err = tails[c][i][j].uncertainty;
                }
            }
        if (!std::isfinite(C)) rep.C_bounded = false;
        rep.sup.push_back({opts.R_ladder[i], C});
        (void)err;
    }
    for (std::size_t i = nR / 2 + 1; i < nR; ++i)
        if (rep.sup[i].C > rep.sup[i - 1].C * (1.0 + 1e-9)) rep.C_nonincreasing = false;

    if (opts.u) {
        for (double R : opts.R_ladder) {
            const RegionACell* prev = nullptr;
            for (auto n : ns) {
                const Decomposition d = decompose_energy(space, *opts.u, family, n, R, centers[0], opts.energy);
                rep.region_a.push_back({R, n, family.a(n), d.I});
                if (prev) {
                    const double slack = kAgreeSigmas * std::hypot(prev->I.uncertainty, d.I.uncertainty);
                    if (d.I.value > prev->I.value + slack) rep.region_a_decays = false;
                }
                prev = &rep.region_a.back();
            }
        }
    }
    return rep;
}

}  // namespace nlab
