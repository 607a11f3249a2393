// io.hpp — SystemSpec JSON schema, exporters, and deterministic formatting.

#pragma once

#include "eigenpoint/dynamics.hpp"
#include "eigenpoint/model.hpp"
#include "eigenpoint/moments.hpp"
#include "eigenpoint/singularity.hpp"

#include <json.hpp>

#include <string>

namespace eigenpoint {

// Schema: {"topology": str, "n": int, "epsilon": num, "kappa": num,
//          "gamma": [num], "constraint": str|null, "concat": {...}|null}
// with concat = {"left": int, "right": int, "edges": [[l, r], ...],
//                "kind": "xi"|"hamiltonian-1"|"hamiltonian-2"}.
SystemSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SystemSpec& spec);

std::string topology_name(Topology t);
Topology topology_from_name(const std::string& name);

// shortest round-trip decimal form; deterministic across runs
std::string format_double(double v);
std::string format_complex(Complex v);  // "re+imi" style for metadata

nlohmann::json matrix_to_json(const DynamicalMatrix& m);
nlohmann::json report_to_json(const SingularityReport& rep);
nlohmann::json table_to_json(const MomentClassTable& table);
nlohmann::json trajectory_to_json(const GaussianTrajectory& traj);

// CSV bodies (no metadata line; the CLI prepends one)
std::string matrix_to_csv(const DynamicalMatrix& m);
std::string report_to_csv(const SingularityReport& rep);
std::string table_to_csv(const MomentClassTable& table);
std::string trajectory_to_csv(const GaussianTrajectory& traj);

}  // namespace eigenpoint
