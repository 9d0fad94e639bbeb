#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/gradient.hpp"
#include "shapetrack/model.hpp"

namespace shapetrack {

struct GridSteps {
    double dx = 1.0;
    double dy = 1.0;
    double dtheta = 0.0;
    double dsigma = 0.0;
};

/// Discretized 4D search box: circular translation region around the
/// predicted center plus symmetric theta/sigma ranges.
struct SearchSpace {
    Pose center;         // predicted translation, current theta_c / sigma_c
    double trans_radius = 0.0;
    double theta_range = 0.0;  // half-range
    double sigma_range = 0.0;  // half-range
    GridSteps steps;
    double s_min = 0.0;
};

struct SearchConfig {
    double theta_range = 0.1;   // level-0 half-ranges
    double sigma_range = 0.2;
    double expansion_factor = 1.5;
    std::optional<double> trans_radius_override;
    std::optional<GridSteps> step_override;
};

/// Level-0 space: trans_radius = sigma_c * diag / 2, ranges as configured,
/// steps chosen so one grid step moves the farthest model point at most one
/// pixel. Every expansion level multiplies radius, ranges, and steps by the
/// expansion factor; the region is capped at the frame and sigma stays
/// positive across the grid.
SearchSpace make_search_space(const ShapeModel& model, const Pose& predicted_center,
                              int expansion_level, int frame_width, int frame_height,
                              const SearchConfig& cfg, double s_min);

/// Model points prepared for scoring. The evaluation order is a fixed seeded
/// permutation so that spatially clustered occlusion triggers score-cutoff
/// aborts evenly.
struct ScoringPoints {
    std::vector<double> px, py;  // model-space positions
    std::vector<double> dx, dy;  // unit directions

    static ScoringPoints from_model(const ShapeModel& model, uint64_t seed);
    static ScoringPoints from_subset(const ShapeModel& model, std::span<const int> indices,
                                     uint64_t seed);
    size_t size() const { return px.size(); }
};

/// Similarity score: (1/n) |Σ <R(theta) d_i, e(p_i')> / ||e||| with zero
/// contribution for out-of-bounds or near-zero-amplitude lookups. Always in
/// [0, 1]. Terms are accumulated in the ScoringPoints order.
double score_at(const ScoringPoints& pts, const GradientField& field, const Pose& pose,
                Interp mode = Interp::Nearest);

struct CutoffScore {
    bool rejected = false;
    double score = 0.0;      // valid when !rejected; equals score_at exactly
    uint32_t terms = 0;      // evaluated terms (= n when not rejected)
};

/// Score with early termination: after j terms the best reachable score is
/// (|S_j| + (n - j)) / n; evaluation aborts as soon as that bound falls below
/// s_min (minus a 1e-9 slack absorbing accumulation roundoff, so a rejection
/// always implies score_at < s_min).
CutoffScore score_at_with_cutoff(const ScoringPoints& pts, const GradientField& field,
                                 const Pose& pose, double s_min,
                                 Interp mode = Interp::Nearest);

struct Candidate {
    Pose pose;
    double score = 0.0;
};

/// 3x3x3x3 score samples around a grid optimum, in grid-step units.
struct ScoreNeighborhood {
    std::array<double, 81> values{};
    GridSteps steps;
    Pose center_pose;

    static int index(int ix, int iy, int it, int is) {
        return ((is + 1) * 3 + (it + 1)) * 9 + (iy + 1) * 3 + (ix + 1);
    }
    double at(int ix, int iy, int it, int is) const { return values[index(ix, iy, it, is)]; }
};

struct GridSearchOptions {
    int threads = 1;                  // <= 1 runs inline
    bool collect_candidates = false;  // all poses with score >= s_min
    Interp interp = Interp::Nearest;
};

struct GridSearchResult {
    std::optional<Candidate> best;
    ScoreNeighborhood neighborhood;  // filled iff best
    uint64_t poses_evaluated = 0;
    uint64_t terms_evaluated = 0;
    std::vector<Candidate> candidates;  // iff collect_candidates
};

/// Evaluates every grid pose whose translation lies in the circular region.
/// The argmax is deterministic regardless of thread count: ties break by
/// smaller translation distance to the center, then lexicographic grid
/// index. The 3^4 neighborhood around the winner is re-evaluated without
/// cutoff (cells outside the enumerated grid included).
GridSearchResult grid_search(const ScoringPoints& pts, const GradientField& field,
                             const SearchSpace& space, const GridSearchOptions& opts = {});

}  // namespace shapetrack
