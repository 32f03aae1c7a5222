#pragma once

/// @file cli_config.hpp
/// @brief Argument plumbing of the tentkit command line: mesh specifiers, JSON
/// configuration files and the JSON form of a tent slab.

#include "tentkit/driver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tentkit::cli {

/// `square:L`, `step` (default grading), `step:H:HC`, or a mesh file path.
SpatialMesh make_mesh(const std::string& spec);

/// Keys mirror the fields of PitchParams (gamma, ctau), the stepping knobs and
/// ViscosityParams. Unknown keys and wrong types throw ConfigError.
void apply_config(const nlohmann::json& config, RunParams& params);
void apply_config(const nlohmann::json& config, WindTunnelParams& params);
void apply_config(const nlohmann::json& config, ConvergenceParams& params);
nlohmann::json load_config(const std::string& path);

/// "1,2,3"
std::vector<int> parse_int_list(const std::string& text);
/// "2:5" (inclusive) or a single level
std::vector<int> parse_range(const std::string& text);

nlohmann::json tents_to_json(const SpatialMesh& mesh, const TentSlab& slab);
nlohmann::json diagnostics_to_json(const RunDiagnostics& diag);

/// Default initial data of `tentkit solve` per law.
InitialData default_initial_data(const std::string& law);

}  // namespace tentkit::cli
