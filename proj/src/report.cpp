#include "nlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "nlab/error.hpp"

namespace nlab::report {
namespace {

Json opt_measured(const std::optional<Measured>& m) { return m ? measured(*m) : Json(nullptr); }

Json points(const std::vector<double>& v) { return Json(v); }

}  // namespace

Json measured(const Measured& m)
{
    Json j;
    j["value"] = m.value;
    j["uncertainty"] = m.uncertainty;
    j["provenance"] = std::string(to_string(m.provenance));
    return j;
}

Json energy(const EnergyEstimate& e)
{
    const std::string prov(to_string(e.provenance));
    Json j;
    j["n"] = e.params.n;
    j["a_n"] = e.params.a;
    j["E_n"] = measured(e.measured());
    j["stat_stderr"] = e.stat_stderr;
    j["quad_error"] = e.quad_error;
    j["model_uncertainty"] = e.model_uncertainty;
    j["near_part"] = e.near_part;
    j["far_part"] = e.far_part;
    j["deterministic_bias_bound"] = e.deterministic_bias_bound;
    j["partial"] = e.partial;
    j["provenance"] = prov;
    j["r0"] = e.params.r0;
    j["samples"] = e.params.samples;
    j["seed"] = e.params.seed;
    j["first_half"] = opt_measured(e.first_half);
    return j;
}

Json extrapolation(const Extrapolation& e)
{
    Json j;
    j["model"] = to_string(e.model);
    j["limit"] = measured(e.limit);
    j["coefficients"] = e.coefficients;
    j["fit_sigma"] = e.fit_sigma;
    j["bias"] = e.bias;
    j["chi2_per_dof"] = e.chi2_per_dof;
    j["weighted"] = e.weighted;
    return j;
}

Json prediction(const Prediction& p)
{
    Json j;
    j["avr"] = measured(p.avr);
    j["avr_source"] = p.avr_exact ? "exact" : "estimated";
    j["norm_p_pow"] = measured(p.norm);
    j["predicted_limit"] = measured(p.raw);
    j["s_factor"] = p.s_factor ? Json(*p.s_factor) : Json(nullptr);
    j["predicted_s_normalized"] = opt_measured(p.s_normalized);
    j["comparison_dimension"] = p.comparison_dimension ? Json(*p.comparison_dimension) : Json(nullptr);
    j["rcd_bound"] = opt_measured(p.rcd_bound_raw);
    j["rcd_bound_s_normalized"] = opt_measured(p.rcd_bound_s);
    return j;
}

Json profile(const ProfileDiagnostics& d)
{
    Json j;
    j["pass"] = d.pass;
    j["points"] = d.points.size();
    j["monotonicity_violations"] = points(d.monotonicity_violations);
    j["max_derivative_residual"] = d.max_derivative_residual;
    j["max_inverse_residual"] = d.max_inverse_residual;
    j["note"] = d.note;
    return j;
}

Json family(const MollifierReport& r)
{
    Json j;
    j["pass"] = r.pass;
    j["ladder_decreasing"] = r.ladder_decreasing;
    j["decreasing_in_t"] = r.decreasing_in_t;
    j["condition_b"] = r.condition_b;
    j["ratio_identity"] = r.ratio_identity;
    j["ratio_identity_residual"] = r.ratio_identity_residual;
    j["rhoV_decay"] = r.rhoV_decay;
    j["pointwise_to_zero"] = r.pointwise_to_zero;
    Json lim = Json::array();
    for (const auto& t : r.tail_limits)
        lim.push_back(Json{{"R", t.R}, {"sup", t.sup}, {"inf", t.inf}, {"limit_n", t.limit_n}});
    j["tail_limits"] = lim;
    j["double_limit"] = r.double_limit;
    j["tail_limit_ok"] = r.tail_limit_ok;
    Json g;
    g["pass"] = r.generator.pass;
    g["positive_increasing"] = r.generator.positive_increasing;
    g["unbounded"] = r.generator.unbounded;
    g["decay"] = r.generator.decay;
    g["ratio_decreasing"] = r.generator.ratio_decreasing;
    j["generator"] = g;
    j["failures"] = r.failures;
    return j;
}

Json bgi(const BgiReport& r)
{
    Json j;
    j["pass"] = r.pass;
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.r.size(); ++i) rows.push_back(Json{{"r", r.r[i]}, {"ratio", measured(r.ratios[i])}});
    j["ratios"] = rows;
    Json v = Json::array();
    for (const auto& x : r.violations)
        v.push_back(Json{{"r", x.r}, {"R", x.R}, {"ratio_r", x.ratio_r}, {"ratio_R", x.ratio_R}});
    j["violations"] = v;
    j["avr_estimate"] = measured(r.avr_estimate);
    j["density_estimate"] = measured(r.density_estimate);
    j["k_bound"] = r.k_bound;
    return j;
}

Json volume_bound(const VolumeBound& b)
{
    Json j;
    j["k"] = b.k;
    j["bounded"] = b.bounded;
    j["centers"] = b.centers;
    j["decade_max"] = b.decade_max;
    return j;
}

Json validators(const ValidatorSummary& v)
{
    Json j;
    j["pass"] = v.pass;
    j["failures"] = v.failures;
    j["profile"] = profile(v.profile_report);
    j["family"] = family(v.family_report);
    j["bgi"] = v.bgi_report ? bgi(*v.bgi_report) : Json("waived: finite diameter");
    j["volume_bound"] = volume_bound(v.bound_report);
    return j;
}

Json assumption1(const Assumption1Report& r)
{
    Json j;
    Json rows = Json::array();
    for (const auto& x : r.rows) rows.push_back(Json{{"R", x.R}, {"limit_n", measured(x.limit_n)}});
    j["A_row_limits"] = rows;
    Json cols = Json::array();
    for (const auto& x : r.columns) cols.push_back(Json{{"n", x.n}, {"a_n", x.a}, {"tail_at_largest_R", x.at_largest_R}});
    j["A_column_readings"] = cols;
    j["A_limit_n_then_R"] = measured(r.limit_n_then_R);
    j["A_limit_R_then_n"] = r.limit_R_then_n;
    j["avr"] = opt_measured(r.avr);
    j["A_deviation_from_avr"] = r.deviation_from_avr;
    j["A_centers_agree"] = r.centers_agree;
    Json ra = Json::array();
    for (const auto& x : r.region_a) ra.push_back(Json{{"R", x.R}, {"n", x.n}, {"a_n", x.a}, {"I", measured(x.I)}});
    j["B_region_a"] = ra;
    j["B_decays"] = r.region_a.empty() ? Json(nullptr) : Json(r.region_a_decays);
    Json sup = Json::array();
    for (const auto& x : r.sup) sup.push_back(Json{{"R", x.R}, {"C", x.C}});
    j["C_sup"] = sup;
    j["C_bounded"] = r.C_bounded;
    j["C_nonincreasing"] = r.C_nonincreasing;
    return j;
}

Json asymptotic(const AsymptoticReport& r)
{
    Json j;
    Json lad = Json::array();
    for (const auto& e : r.ladder) lad.push_back(energy(e));
    j["ladder"] = lad;
    j["ladder_decreasing"] = r.ladder_decreasing;
    j["extrapolation"] = r.ran ? extrapolation(r.extrapolation) : Json(nullptr);
    j["prediction"] = r.ran ? prediction(r.prediction) : Json(nullptr);
    Json v;
    v["ran"] = r.ran;
    v["tolerance"] = r.tolerance;
    v["abs_floor"] = r.abs_floor;
    v["deviation"] = r.deviation;
    v["relative_deviation"] = r.relative_deviation;
    v["allowed"] = r.allowed;
    v["rcd_ok"] = r.rcd_ok ? Json(*r.rcd_ok) : Json(nullptr);
    v["rcd_equality"] = r.rcd_ok ? Json(r.rcd_equality) : Json(nullptr);
    v["pass"] = r.pass;
    v["notes"] = r.notes;
    j["verdict"] = v;
    return j;
}

Json decomposition(const Decomposition& d)
{
    Json j;
    j["n"] = d.total.params.n;
    j["a_n"] = d.total.params.a;
    j["R"] = d.total.params.R;
    j["I"] = measured(d.I);
    j["II"] = measured(d.II);
    j["III"] = measured(d.III);
    j["E_n"] = measured(d.total.measured());
    j["max_partition_residual"] = d.max_partition_residual;
    return j;
}

std::string number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_json(const std::string& path, const Json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_csv(const std::string& path, const Table& t)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
        out << '\n';
    }
}

Table ladder_table(const AsymptoticReport& r)
{
    Table t{{"a_n", "E_n", "stderr", "predicted"}, {}};
    for (const auto& e : r.ladder) t.rows.push_back({e.params.a, e.value, e.uncertainty(), r.prediction.raw.value});
    return t;
}

Table tails_table(const MollifierReport& r)
{
    Table t{{"n", "a_n", "R", "tail"}, {}};
    for (const auto& x : r.tails) t.rows.push_back({static_cast<double>(x.n), x.a, x.R, x.tail});
    return t;
}

Table assumption1_table(const Assumption1Report& r, int chart_dim, const std::vector<Point>& centers)
{
    Table t;
    t.header.push_back("center");
    for (int k = 0; k < chart_dim; ++k) t.header.push_back("x" + std::to_string(k));
    for (const char* h : {"R", "n", "a_n", "tail", "stderr"}) t.header.push_back(h);
    for (const auto& c : r.table) {
        std::vector<double> row{static_cast<double>(c.center)};
        for (int k = 0; k < chart_dim; ++k) row.push_back(centers.at(c.center)[k]);
        row.insert(row.end(), {c.R, static_cast<double>(c.n), c.a, c.tail.value, c.tail.uncertainty});
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table volume_table(const std::vector<VolumeRow>& rows, int chart_dim)
{
    Table t;
    for (int k = 0; k < chart_dim; ++k) t.header.push_back("x" + std::to_string(k));
    for (const char* h : {"r", "volume", "stderr"}) t.header.push_back(h);
    for (const auto& v : rows) {
        std::vector<double> row;
        for (int k = 0; k < chart_dim; ++k) row.push_back(v.center[k]);
        row.insert(row.end(), {v.r, v.volume.value, v.volume.uncertainty});
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace nlab::report
