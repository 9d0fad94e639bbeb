#pragma once

#include <string>
#include <vector>

#include "shapetrack/bench.hpp"
#include "shapetrack/image.hpp"
#include "shapetrack/model.hpp"
#include "shapetrack/synth.hpp"
#include "shapetrack/tracker.hpp"

namespace shapetrack {

/// Frame sources: a directory (all raster files, sorted lexicographically),
/// a glob pattern with '*'/'?' in the filename part, or a .txt list file
/// (one path per line). Throws when nothing matches.
std::vector<std::string> resolve_sequence(const std::string& source);

void write_poses_csv(const std::vector<FrameResult>& results, const std::string& path);
std::vector<FrameResult> read_poses_csv(const std::string& path);

/// Frame with projected model points and the model bounding box burned in.
GrayImage render_overlay(const GrayImage& frame, const ShapeModel& model, const Pose& pose);

/// Synthesis recipe from a JSON spec file (see README for the schema).
SynthSpec load_synth_spec(const std::string& path);

}  // namespace shapetrack
