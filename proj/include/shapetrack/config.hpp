#pragma once

#include <string>

#include <json.hpp>

#include "shapetrack/tracker.hpp"

namespace shapetrack {

/// Flat dotted-key JSON overlay for TrackerConfig, e.g.
/// {"tracker.s_min": 0.4, "update.lambda": 0.1, "search.theta_range": "deg:6"}.
/// Angle-valued keys accept a "deg:" string prefix; everything else is
/// radians. Unknown keys throw. Precedence is defaults < file < flags, with
/// flags applied by the CLI after this overlay.
TrackerConfig apply_config_json(const nlohmann::json& flat, TrackerConfig base);

TrackerConfig load_config_file(const std::string& path, TrackerConfig base);

/// Fully resolved configuration as the same flat dotted-key document.
nlohmann::json config_to_json(const TrackerConfig& cfg);

/// Parses a number or a "deg:<value>" string into radians.
double parse_angle_value(const nlohmann::json& v);

}  // namespace shapetrack
