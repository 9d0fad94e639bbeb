#pragma once

#include "shapetrack/gradient.hpp"
#include "shapetrack/model.hpp"

namespace shapetrack {

struct UpdateConfig {
    double lambda = 0.1;          // blend factor toward the match, [0, 1]
    double ema_alpha = 0.2;       // found-rate smoothing, (0, 1]
    double prune_below = 0.25;    // found_ema threshold, [0, 1)
    int min_age_to_prune = 10;    // frames
    double resample_spacing = 2.0;  // pixels, image space
    int max_points = 1024;
    double normal_search_len = 3.0;  // pixels
    double cos_tol = 0.5;            // direction agreement for a valid match
    int min_model_points = 32;       // pruning never goes below this
};

struct UpdateStats {
    int total = 0;
    int matched = 0;
};

/// Moves each matched point toward its back-transformed match by lambda,
/// refreshes its direction from the image gradient at the match (same lambda
/// blend, applied on the angle), and updates found_ema. Unmatched points
/// keep position and direction. Ages every point by one frame.
UpdateStats update_points(ShapeModel& model, const GradientField& field, const Pose& pose,
                          const UpdateConfig& cfg);

/// Removes points with found_ema < prune_below and age >= min_age_to_prune,
/// sparing the healthiest of them when removal would drop the model below
/// min_model_points. Returns the number removed.
int prune_points(ShapeModel& model, const UpdateConfig& cfg);

/// Extracts fresh edge points inside the transformed model's bounding region
/// and inserts those farther than resample_spacing (image space) from every
/// existing transformed point and from each other, up to max_points.
/// Returns the number added.
int resample_points(ShapeModel& model, const GradientField& field, const Pose& pose,
                    const UpdateConfig& cfg);

}  // namespace shapetrack
