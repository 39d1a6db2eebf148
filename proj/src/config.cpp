#include "nlab/config.hpp"

#include <cmath>
#include <fstream>

#include "nlab/error.hpp"

namespace nlab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

const json& section(const json& j, const char* key)
{
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    const json& s = j.at(key);
    if (!s.is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
    return s;
}

double param(const json& spec, const char* key)
{
    const json& p = section(spec, "params");
    if (!p.contains(key) || !p.at(key).is_number())
        throw ConfigError(std::string("config: missing numeric parameter '") + key + "'");
    return p.at(key).get<double>();
}

double param_or(const json& spec, const char* key, double fallback)
{
    const json& p = section(spec, "params");
    if (!p.contains(key)) return fallback;
    if (!p.at(key).is_number()) throw ConfigError(std::string("config: parameter '") + key + "' must be a number");
    return p.at(key).get<double>();
}

int int_param(const json& spec, const char* key)
{
    const double v = param(spec, key);
    if (v != std::floor(v)) throw ConfigError(std::string("config: parameter '") + key + "' must be an integer");
    return static_cast<int>(v);
}

ProfilePtr profile_from(const json& spec)
{
    const std::string kind = get_or<std::string>(spec, "kind", "");
    if (kind == "power") return make_power_profile(int_param(spec, "N"));
    if (kind == "hyperbolic") return make_hyperbolic_profile(param(spec, "K"), int_param(spec, "N"));
    if (kind == "exponential") return make_exponential_profile();
    throw ConfigError("config: unknown profile kind '" + kind + "'");
}

bool has_line_chart(const json& space)
{
    const std::string name = get_or<std::string>(space, "name", "");
    if (name == "euclidean") return param(space, "N") == 1.0;
    return name == "warped_line" || name == "circle";
}

EnergyMethod method_from(const std::string& s)
{
    if (s == "auto") return EnergyMethod::automatic;
    if (s == "quadrature") return EnergyMethod::quadrature;
    if (s == "monte-carlo") return EnergyMethod::monte_carlo;
    throw ConfigError("config: unknown estimator method '" + s + "'");
}

}  // namespace

ordered_json ExperimentConfig::to_json() const
{
    ordered_json j;
    j["scenario"] = scenario;
    j["space"] = ordered_json(space);
    j["profile"] = profile ? ordered_json(*profile) : ordered_json(nullptr);
    j["generator"] = ordered_json(generator);
    j["ladder"] = {{"mode", ladder_mode}, {"values", ladder_values}};
    j["test_function"] = {{"kind", u_kind}, {"center", u_center}, {"radius", u_radius}, {"p", p}};
    ordered_json est;
    est["method"] = nlab::to_string(method);
    est["samples"] = samples;
    est["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    est["r0"] = r0 ? ordered_json(*r0) : ordered_json(nullptr);
    est["tol"] = tol;
    j["estimator"] = est;
    j["asymptotics"] = {{"model", nlab::to_string(model)}, {"tolerance", tolerance}, {"abs_floor", abs_floor}};
    j["validate"] = {{"R_ladder", R_ladder},
                     {"centers", centers},
                     {"center_scale", center_scale},
                     {"region_a", region_a}};
    j["decompose"] = {{"R", decompose_R}, {"x0", x0}};
    return j;
}

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override)
{
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    c.scenario = get_or<std::string>(j, "scenario", "unnamed");

    if (!j.contains("space")) throw ConfigError("config: missing 'space'");
    c.space = section(j, "space");
    if (!c.space.contains("params")) c.space["params"] = json::object();
    if (j.contains("profile") && !j.at("profile").is_null()) c.profile = section(j, "profile");

    if (!j.contains("generator")) throw ConfigError("config: missing 'generator'");
    c.generator = section(j, "generator");

    const json& lad = section(j, "ladder");
    c.ladder_mode = get_or<std::string>(lad, "mode", c.ladder_mode);
    if (c.ladder_mode != "s_times_p" && c.ladder_mode != "explicit")
        throw ConfigError("config: ladder mode must be 's_times_p' or 'explicit'");
    c.ladder_values = get_or<std::vector<double>>(lad, "values", c.ladder_values);
    if (c.ladder_values.empty()) throw ConfigError("config: empty ladder");

    if (!j.contains("test_function")) throw ConfigError("config: missing 'test_function'");
    const json& u = section(j, "test_function");
    c.u_kind = get_or<std::string>(u, "kind", c.u_kind);
    c.u_center = get_or<std::vector<double>>(u, "center", {});
    c.u_radius = get_or<double>(u, "radius", c.u_radius);
    c.p = get_or<double>(u, "p", c.p);
    if (c.u_center.size() > static_cast<std::size_t>(kMaxChartDim))
        throw ConfigError("config: test function centre has too many coordinates");

    const json& est = section(j, "estimator");
    c.method = method_from(get_or<std::string>(est, "method", "auto"));
    c.samples = get_or<std::uint64_t>(est, "samples", c.samples);
    if (est.contains("seed") && !est.at("seed").is_null()) c.seed = get_or<std::uint64_t>(est, "seed", 0);
    if (est.contains("r0") && !est.at("r0").is_null()) c.r0 = get_or<double>(est, "r0", 0.0);
    c.tol = get_or<double>(est, "tol", c.tol);

    const json& as = section(j, "asymptotics");
    try {
        c.model = extrapolation_model_from_string(get_or<std::string>(as, "model", "auto"));
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.tolerance = get_or<double>(as, "tolerance", c.tolerance);
    c.abs_floor = get_or<double>(as, "abs_floor", c.abs_floor);

    const json& val = section(j, "validate");
    c.R_ladder = get_or<std::vector<double>>(val, "R_ladder", c.R_ladder);
    c.centers = get_or<std::size_t>(val, "centers", c.centers);
    c.center_scale = get_or<double>(val, "center_scale", c.center_scale);
    c.region_a = get_or<bool>(val, "region_a", c.region_a);

    const json& dec = section(j, "decompose");
    if (dec.contains("R") && dec.at("R").is_number()) {
        c.decompose_R = {dec.at("R").get<double>()};
    } else {
        c.decompose_R = get_or<std::vector<double>>(dec, "R", c.decompose_R);
    }
    c.x0 = get_or<std::vector<double>>(dec, "x0", c.u_center);

    const json& out = section(j, "output");
    c.out_dir = get_or<std::string>(out, "dir", c.out_dir);

    // Resolve the cheap specs now so a bad file fails before any work.
    build_generator(c);
    build_test_function(c);

    if (seed_override) c.seed = seed_override;
    if (uses_monte_carlo(c) && !c.seed) throw ConfigError("config: Monte Carlo scenario needs an estimator seed");
    return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    return parse_config(j, seed_override);
}

bool uses_monte_carlo(const ExperimentConfig& c)
{
    if (c.region_a) return true;
    switch (c.method) {
    case EnergyMethod::monte_carlo: return true;
    case EnergyMethod::quadrature: return false;
    case EnergyMethod::automatic: return !has_line_chart(c.space);
    }
    return true;
}

SpacePtr build_space(const ExperimentConfig& c)
{
    const std::string name = get_or<std::string>(c.space, "name", "");
    try {
        if (name == "euclidean") return make_euclidean(int_param(c.space, "N"));
        if (name == "normed") return make_normed(int_param(c.space, "N"), param(c.space, "q"));
        if (name == "warped_line") {
            const json& p = section(c.space, "params");
            if (!p.contains("profile")) throw ConfigError("config: warped_line needs params.profile");
            return make_warped_line(profile_from(p.at("profile")));
        }
        if (name == "circle") return make_circle(param(c.space, "radius"));
        if (name == "heisenberg") {
            const auto samples = static_cast<std::uint64_t>(param_or(c.space, "samples", 1e7));
            const auto seed = static_cast<std::uint64_t>(param_or(c.space, "seed", 2024));
            return make_heisenberg(samples, seed);
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: unknown space '" + name + "'");
}

ProfilePtr build_profile(const ExperimentConfig& c, const Space& space)
{
    if (!c.profile) return space.natural_profile();
    try {
        return profile_from(*c.profile);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

Generator build_generator(const ExperimentConfig& c)
{
    const std::string kind = get_or<std::string>(c.generator, "kind", "");
    if (kind == "power") {
        const double alpha = get_or<double>(c.generator, "alpha", 0.0);
        if (!(alpha > 0.0)) throw ConfigError("config: power generator needs alpha > 0");
        return Generator::power(alpha);
    }
    if (kind == "exp") return Generator::exponential();
    if (kind == "log") return Generator::logarithmic();
    throw ConfigError("config: unknown generator kind '" + kind + "'");
}

Ladder build_ladder(const ExperimentConfig& c)
{
    if (c.ladder_mode == "explicit") return Ladder::explicit_a(c.ladder_values);
    return Ladder::s_times_p(c.ladder_values, c.p);
}

MollifierFamily build_family(const ExperimentConfig& c, const Space& space)
{
    return make_family(build_generator(c), build_profile(c, space), build_ladder(c));
}

MollifierFamily build_family_unchecked(const ExperimentConfig& c, const Space& space)
{
    return MollifierFamily(build_generator(c), build_profile(c, space), build_ladder(c));
}

Point to_point(const std::vector<double>& v)
{
    Point x{};
    for (std::size_t i = 0; i < v.size() && i < x.size(); ++i) x[i] = v[i];
    return x;
}

TestFunction build_test_function(const ExperimentConfig& c)
{
    const Point x = to_point(c.u_center);
    try {
        if (c.u_kind == "ball_indicator") return TestFunction::indicator(x, c.u_radius, c.p);
        if (c.u_kind == "tent") return TestFunction::tent(x, c.u_radius, c.p);
        if (c.u_kind == "smooth_bump") return TestFunction::bump(x, c.u_radius, c.p);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: unknown test function kind '" + c.u_kind + "'");
}

EnergyOptions build_energy_options(const ExperimentConfig& c, unsigned workers)
{
    EnergyOptions o;
    o.r0 = c.r0;
    o.tol = c.tol;
    o.samples = c.samples;
    o.seed = c.seed.value_or(0);
    o.workers = workers;
    return o;
}

}  // namespace nlab
