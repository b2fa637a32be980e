#pragma once

#include <string>

#include <json.hpp>

#include "qcap/capacity.hpp"
#include "qcap/experiments.hpp"
#include "qcap/gauges.hpp"
#include "qcap/potentials.hpp"

namespace qcap {

using json = nlohmann::ordered_json;

json to_json(const PotentialProfile& p);
json to_json(const CurvatureEstimate& c);
json to_json(const CapacityEstimate& c);
json to_json(const DoublingReport& d);
json to_json(const ExperimentReport& r);
// per-generation radii plus per-node {path, s_log, t_log, mass_log} when the
// tree is enumerable
json to_json(const CantorTree& t);

// header scale_label,contribution,running_total
std::string to_csv(const PotentialProfile& p);
std::string to_csv(const ExperimentReport& r);
// two columns key,value for flat records
std::string flat_csv(const json& j);

// 2 spaces, trailing newline
std::string dump(const json& j);

}  // namespace qcap
