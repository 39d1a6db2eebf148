#include "nlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "nlab/asymptotics.hpp"
#include "nlab/config.hpp"
#include "nlab/error.hpp"
#include "nlab/report.hpp"

namespace nlab {
namespace {

namespace fs = std::filesystem;
using report::Json;

struct Context {
    ExperimentConfig cfg;
    SpacePtr space;
    fs::path out;
    unsigned workers = 1;
};

Context load(const CommandOptions& o)
{
    if (o.config_path.empty()) throw ConfigError("no --config given");
    Context c;
    c.cfg = load_config(o.config_path, o.seed);
    if (o.samples) c.cfg.samples = *o.samples;
    if (o.out_dir) c.cfg.out_dir = *o.out_dir;
    c.workers = std::max(1u, o.workers);
    c.space = build_space(c.cfg);
    c.out = c.cfg.out_dir;
    fs::create_directories(c.out);
    return c;
}

Json header(const Context& c, const char* command)
{
    Json j;
    j["scenario"] = c.cfg.scenario;
    j["command"] = command;
    j["config"] = c.cfg.to_json();
    Json s;
    s["name"] = c.space->name();
    Json params = Json::object();
    for (const auto& [k, v] : c.space->params()) params[k] = v;
    s["params"] = params;
    s["note"] = c.space->note();
    j["space"] = s;
    return j;
}

std::vector<Point> centers_for(const Context& c)
{
    std::vector<Point> pts{c.space->base_point()};
    if (c.cfg.centers > 1) {
        auto more = random_centers(*c.space, c.cfg.centers - 1, c.cfg.center_scale, 11);
        pts.insert(pts.end(), more.begin(), more.end());
    }
    return pts;
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool assumption1_ok(const Assumption1Report& a, double tol, double abs_floor)
{
    bool ok = a.centers_agree && a.C_bounded && a.C_nonincreasing;
    if (!a.region_a.empty()) ok = ok && a.region_a_decays;
    if (a.avr) {
        const double allowed = a.avr->value == 0.0
                                   ? abs_floor
                                   : tol * a.avr->value + a.avr->uncertainty + a.limit_n_then_R.uncertainty;
        ok = ok && a.deviation_from_avr <= allowed;
    }
    return ok;
}

int cmd_verify(const CommandOptions& o, std::ostream& out)
{
    Context c = load(o);
    const MollifierFamily fam = build_family_unchecked(c.cfg, *c.space);
    ValidatorSummary v = run_validators(*c.space, fam);

    Json j = header(c, "verify");
    j["validators"] = report::validators(v);
    report::write_csv((c.out / "tails.csv").string(), report::tails_table(v.family_report));

    const auto centers = centers_for(c);
    report::write_csv((c.out / "volumes.csv").string(),
                      report::volume_table(ball_volume_table(*c.space, centers, c.cfg.R_ladder), c.space->chart_dim()));

    bool a1_ok = false;
    if (v.family_report.ladder_decreasing && fam.size() >= 3) {
        Assumption1Options ao;
        ao.centers = centers;
        ao.R_ladder = c.cfg.R_ladder;
        if (c.cfg.region_a) ao.u = build_test_function(c.cfg);
        ao.energy = build_energy_options(c.cfg, c.workers);
        const Assumption1Report a = validate_assumption1(*c.space, fam, ao);
        a1_ok = assumption1_ok(a, c.cfg.tolerance, c.cfg.abs_floor);
        Json aj = report::assumption1(a);
        aj["pass"] = a1_ok;
        j["assumption1"] = aj;
        report::write_csv((c.out / "assumption1.csv").string(),
                          report::assumption1_table(a, c.space->chart_dim(), centers));
    } else {
        j["assumption1"] = "skipped: ladder not strictly decreasing or shorter than 3";
    }
    const bool pass = v.pass && a1_ok;
    j["verdict"] = Json{{"pass", pass}, {"failures", v.failures}};
    report::write_json((c.out / "report.json").string(), j);

    out << "verify " << c.cfg.scenario << ": " << (pass ? "PASS" : "FAIL");
    for (const auto& f : v.failures) out << "; " << f;
    if (!a1_ok && v.pass) out << "; tail-mass checks failed";
    out << '\n';
    return pass ? kExitPass : kExitFail;
}

int cmd_ms_limit(const CommandOptions& o, std::ostream& out)
{
    Context c = load(o);
    const MollifierFamily fam = build_family(c.cfg, *c.space);
    const TestFunction u = build_test_function(c.cfg);
    CheckOptions co;
    co.tol = c.cfg.tolerance;
    co.abs_floor = c.cfg.abs_floor;
    co.model = c.cfg.model;
    co.ladder.method = c.cfg.method;
    co.ladder.energy = build_energy_options(c.cfg, c.workers);
    co.skip_validate = o.skip_validate;
    const AsymptoticReport r = check_ms(*c.space, u, fam, co);

    Json j = header(c, "ms-limit");
    j["validators"] = r.validators ? report::validators(*r.validators) : Json("skipped");
    const Json a = report::asymptotic(r);
    for (const auto& [k, v] : a.items()) j[k] = v;
    report::write_json((c.out / "report.json").string(), j);
    if (r.ran) report::write_csv((c.out / "ladder.csv").string(), report::ladder_table(r));

    if (!r.ran) {
        out << "validators failed:";
        for (const auto& f : r.validators->failures) out << ' ' << f << ';';
        out << " FAIL\n";
        return kExitFail;
    }
    const double lim = r.extrapolation.limit.value;
    const double pred = r.prediction.raw.value;
    out << "limit " << fixed(lim, 2) << " predicted " << fixed(pred, 2);
    if (pred != 0.0)
        out << " dev " << fixed(100.0 * r.relative_deviation, 1) << "%";
    else
        out << " |limit| " << fixed(std::abs(lim), 4) << " floor " << fixed(r.abs_floor, 2);
    out << (r.pass ? " PASS" : " FAIL");
    if (r.prediction.s_normalized && *r.prediction.s_factor != 1.0)
        out << " (s-normalized " << fixed(lim * *r.prediction.s_factor, 2) << " vs "
            << fixed(r.prediction.s_normalized->value, 2) << ")";
    out << '\n';
    return r.pass ? kExitPass : kExitFail;
}

int cmd_decompose(const CommandOptions& o, std::ostream& out)
{
    Context c = load(o);
    if (!c.cfg.seed) throw ConfigError("config: decompose is Monte Carlo and needs an estimator seed");
    const MollifierFamily fam = build_family(c.cfg, *c.space);
    const TestFunction u = build_test_function(c.cfg);
    const EnergyOptions eo = build_energy_options(c.cfg, c.workers);
    const Point x0 = to_point(c.cfg.x0);
    const Prediction pred = predict_limit(*c.space, u, fam);

    Json j = header(c, "decompose");
    j["predicted_limit"] = report::measured(pred.raw);
    Json rows = Json::array();
    report::Table t{{"R", "n", "a_n", "I", "I_stderr", "II", "II_stderr", "III", "III_stderr", "E_n", "E_stderr",
                     "residual"},
                    {}};
    double worst = 0.0;
    for (double R : c.cfg.decompose_R) {
        for (std::size_t n = 0; n < fam.size(); ++n) {
            const Decomposition d = decompose_energy(*c.space, u, fam, n, R, x0, eo);
            worst = std::max(worst, d.max_partition_residual);
            rows.push_back(report::decomposition(d));
            t.rows.push_back({R, static_cast<double>(n), fam.a(n), d.I.value, d.I.uncertainty, d.II.value,
                              d.II.uncertainty, d.III.value, d.III.uncertainty, d.total.value,
                              d.total.stat_stderr, d.max_partition_residual});
        }
    }
    j["decomposition"] = rows;
    const bool pass = worst <= 1e-12;
    j["verdict"] = Json{{"max_partition_residual", worst}, {"pass", pass}};
    report::write_json((c.out / "report.json").string(), j);
    report::write_csv((c.out / "decompose.csv").string(), t);
    out << "decompose " << c.cfg.scenario << ": max partition residual " << report::number(worst)
        << (pass ? " PASS" : " FAIL") << '\n';
    return pass ? kExitPass : kExitFail;
}

int cmd_avr(const CommandOptions& o, std::ostream& out)
{
    Context c = load(o);
    const ProfilePtr V = build_profile(c.cfg, *c.space);
    const auto grid = log_grid(1e-2, 1e3, 16);
    Json j = header(c, "avr");
    const Estimate avr = estimate_avr(*c.space, *V, grid);
    j["avr"] = report::measured(avr.value);
    j["avr_low_precision"] = avr.low_precision;

    const auto centers = centers_for(c);
    std::vector<double> down(grid.rbegin(), grid.rend());
    Json dens = Json::array();
    bool low = avr.low_precision;
    for (const auto& x : centers) {
        const Estimate d = estimate_density(*c.space, *V, x, down);
        low = low || d.low_precision;
        Json row;
        row["center"] = std::vector<double>(x.begin(), x.begin() + c.space->chart_dim());
        row["density"] = report::measured(d.value);
        row["low_precision"] = d.low_precision;
        dens.push_back(row);
    }
    j["density"] = dens;

    bool pass = true;
    if (!std::isfinite(c.space->diameter())) {
        const BgiReport b = check_bgi(*c.space, *V, grid);
        j["bgi"] = report::bgi(b);
        pass = b.pass;
    } else {
        j["bgi"] = "waived: finite diameter";
    }
    j["verdict"] = Json{{"pass", pass}, {"low_precision", low}};
    report::write_json((c.out / "report.json").string(), j);
    report::write_csv((c.out / "volumes.csv").string(),
                      report::volume_table(ball_volume_table(*c.space, centers, grid), c.space->chart_dim()));
    out << "avr " << c.cfg.scenario << ": " << report::number(avr.value.value) << " +- "
        << report::number(avr.value.uncertainty) << (low ? " (low precision)" : "") << (pass ? " PASS" : " FAIL")
        << '\n';
    return pass ? kExitPass : kExitFail;
}

int cmd_tail_table(const CommandOptions& o, std::ostream& out)
{
    Context c = load(o);
    const MollifierFamily fam = build_family(c.cfg, *c.space);
    const double lo = std::max(1e-3, 2.0 * fam.domain_floor());
    const MollifierReport fr = verify_family(fam, log_grid(lo, lo * 1e7, 57), {}, c.cfg.R_ladder);
    Assumption1Options ao;
    ao.centers = centers_for(c);
    ao.R_ladder = c.cfg.R_ladder;
    const Assumption1Report a = validate_assumption1(*c.space, fam, ao);

    Json j = header(c, "tail-table");
    j["family"] = report::family(fr);
    j["assumption1"] = report::assumption1(a);
    report::write_json((c.out / "report.json").string(), j);
    report::write_csv((c.out / "tails.csv").string(), report::tails_table(fr));
    report::write_csv((c.out / "assumption1.csv").string(),
                      report::assumption1_table(a, c.space->chart_dim(), ao.centers));
    out << "tail-table " << c.cfg.scenario << ": lim_R lim_n = " << report::number(a.limit_n_then_R.value)
        << ", lim_n lim_R reading = " << report::number(a.limit_R_then_n) << '\n';
    return kExitPass;
}

}  // namespace

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        if (name == "verify") return cmd_verify(opts, out);
        if (name == "ms-limit") return cmd_ms_limit(opts, out);
        if (name == "decompose") return cmd_decompose(opts, out);
        if (name == "avr") return cmd_avr(opts, out);
        if (name == "tail-table") return cmd_tail_table(opts, out);
        err << "unknown command: " << name << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidParameter& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violation: " << e.what() << '\n';
        return kExitFail;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace nlab
