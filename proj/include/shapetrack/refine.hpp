#pragma once

#include <optional>
#include <span>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/gradient.hpp"
#include "shapetrack/model.hpp"
#include "shapetrack/search.hpp"

namespace shapetrack {

struct FacetResult {
    Pose pose;
    double score = 0.0;
    bool degenerate = false;  // indefinite Hessian or vertex outside the cell
};

/// Least-squares fit of a 15-coefficient 4D quadratic to the 81 neighborhood
/// samples; returns the interpolated maximum when the Hessian is negative
/// definite and the vertex stays within one grid step per dimension,
/// otherwise the center pose unchanged with the degenerate flag set.
FacetResult facet_refine(const ScoreNeighborhood& nb);

/// Best image match for a model point along its transformed direction.
struct NormalMatch {
    int model_index = -1;
    Vec2 q;               // matched subpixel image point
    Vec2 n_hat;           // unit normal (transformed model direction)
    double offset = 0.0;  // signed distance from p' to q along n_hat
};

/// Samples the amplitude at 0.5 px steps along p' ± t n_hat, t in
/// [0, max_len]; candidates are interior local maxima whose image direction
/// satisfies |<e_hat, n_hat>| >= cos_tol. The candidate with the smallest
/// |offset| wins and is parabola-refined along the line.
std::optional<NormalMatch> find_normal_match(const GradientField& field, const Vec2& p_prime,
                                             const Vec2& n_hat, double max_len,
                                             double cos_tol = 0.5, int model_index = -1);

/// find_normal_match for every model point at the given pose.
std::vector<NormalMatch> find_normal_matches(const ShapeModel& model, const GradientField& field,
                                             const Pose& pose, double max_len,
                                             double cos_tol = 0.5);

/// Linear similarity parameters (a, b, tx, ty) with a = sigma cos(theta),
/// b = sigma sin(theta): the chart in which the point-to-line problem is
/// linear in all four parameters.
struct SimilarityParams {
    double a = 1.0;
    double b = 0.0;
    double tx = 0.0;
    double ty = 0.0;

    static SimilarityParams from_pose(const Pose& p);
    Pose to_pose() const;  // sigma = hypot(a, b), theta = atan2(b, a)
};

/// Point-to-line residual n_hat . (T(p) - q) for one correspondence.
double point_line_residual(const Vec2& p, const Vec2& n_hat, const Vec2& q,
                           const SimilarityParams& s);

/// Residual derivative w.r.t. (a, b, tx, ty); constant in the parameters.
void point_line_jacobian(const Vec2& p, const Vec2& n_hat, double row[4]);

/// One Gauss-Newton step on the point-to-line cost
/// Σ [n_hat_i . (p_i'(pose) - q_i)]². In the (a, b, tx, ty) chart the
/// residual is linear, so the step solves the problem exactly and keeps
/// sigma > 0 through the norm. Requires >= 4 matches spanning at least two
/// normal directions; returns nullopt on a rank-deficient normal system.
std::optional<Pose> least_squares_pose(const ShapeModel& model,
                                       std::span<const NormalMatch> matches, const Pose& init);

}  // namespace shapetrack
