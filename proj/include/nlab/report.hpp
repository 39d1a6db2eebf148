#pragma once
// JSON and CSV output. Keys keep insertion order; no timestamps, host
// names or worker counts, so reruns are byte-identical.

#include <string>
#include <vector>

#include <json.hpp>

#include "nlab/asymptotics.hpp"
#include "nlab/energy.hpp"
#include "nlab/space.hpp"

namespace nlab::report {

using Json = nlohmann::ordered_json;

Json measured(const Measured& m);
Json energy(const EnergyEstimate& e);
Json extrapolation(const Extrapolation& e);
Json prediction(const Prediction& p);
Json profile(const ProfileDiagnostics& d);
Json family(const MollifierReport& r);
Json bgi(const BgiReport& r);
Json volume_bound(const VolumeBound& b);
Json validators(const ValidatorSummary& v);
Json assumption1(const Assumption1Report& r);
Json asymptotic(const AsymptoticReport& r);
Json decomposition(const Decomposition& d);

/// Shortest round-trip decimal form.
std::string number(double v);

void write_json(const std::string& path, const Json& j);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const Table& t);

Table ladder_table(const AsymptoticReport& r);
Table tails_table(const MollifierReport& r);
Table assumption1_table(const Assumption1Report& r, int chart_dim, const std::vector<Point>& centers);
Table volume_table(const std::vector<VolumeRow>& rows, int chart_dim);

}  // namespace nlab::report
