#pragma once
// Experiment configuration files (JSON) and the objects they describe.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlab/asymptotics.hpp"
#include "nlab/mollifier.hpp"
#include "nlab/space.hpp"
#include "nlab/test_function.hpp"
#include "nlab/volume_profile.hpp"

namespace nlab {

struct ExperimentConfig {
    std::string scenario;
    nlohmann::json space;  // {name, params}
    std::optional<nlohmann::json> profile;  // {kind, params}; default: the space's own
    nlohmann::json generator;  // {kind, alpha?}
    std::string ladder_mode = "s_times_p";
    std::vector<double> ladder_values{0.2, 0.1, 0.05, 0.025, 0.0125};
    std::string u_kind = "ball_indicator";
    std::vector<double> u_center;
    double u_radius = 1.0;
    double p = 1.0;

    EnergyMethod method = EnergyMethod::automatic;
    std::uint64_t samples = 1'000'000;
    std::optional<std::uint64_t> seed;
    std::optional<double> r0;
    double tol = 1e-10;

    ExtrapolationModel model = ExtrapolationModel::automatic;
    double tolerance = 0.02;
    double abs_floor = 0.05;

    std::vector<double> R_ladder{1.0, 10.0, 100.0, 1000.0};
    std::size_t centers = 4;
    double center_scale = 5.0;
    bool region_a = false;
    std::vector<double> decompose_R{10.0};
    std::vector<double> x0;

    std::string out_dir = "out";

    /// Every field with its effective value, for self-describing reports.
    nlohmann::ordered_json to_json() const;
};

/// Parses and validates; throws ConfigError. `seed_override` stands in for
/// a missing seed (the --seed flag).
ExperimentConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {});

SpacePtr build_space(const ExperimentConfig& c);
ProfilePtr build_profile(const ExperimentConfig& c, const Space& space);
Generator build_generator(const ExperimentConfig& c);
Ladder build_ladder(const ExperimentConfig& c);
/// Checked family (throws InvalidParameter on a bad ladder).
MollifierFamily build_family(const ExperimentConfig& c, const Space& space);
/// Unchecked family, so validators can report what is wrong with it.
MollifierFamily build_family_unchecked(const ExperimentConfig& c, const Space& space);
TestFunction build_test_function(const ExperimentConfig& c);
EnergyOptions build_energy_options(const ExperimentConfig& c, unsigned workers);
Point to_point(const std::vector<double>& v);

/// Monte Carlo is used by this scenario's energy runs.
bool uses_monte_carlo(const ExperimentConfig& c);

}  // namespace nlab
