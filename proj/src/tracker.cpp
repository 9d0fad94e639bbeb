#include "shapetrack/tracker.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "shapetrack/rng.hpp"

namespace shapetrack {

namespace {

using Clock = std::chrono::steady_clock;

int64_t us_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

}  // namespace

Tracker::Tracker(const GrayImage& first_frame, const Roi& roi, const TrackerConfig& cfg)
    : cfg_(cfg), frame_w_(first_frame.width), frame_h_(first_frame.height) {
    const GradientField field = sobel_gradients(first_frame);
    model_ = build_model(field, roi, cfg.model);
    pose_ = Pose::identity_at(model_.ref_point);
    prev_pose_ = pose_;
}

Tracker::Tracker(const GrayImage& first_frame, ShapeModel model, const TrackerConfig& cfg)
    : cfg_(cfg), model_(std::move(model)), frame_w_(first_frame.width),
      frame_h_(first_frame.height) {
    pose_ = Pose::identity_at(model_.ref_point);
    prev_pose_ = pose_;
}

Pose Tracker::predicted_center() const {
    Pose c = pose_;
    if (last_was_tracked_) {
        // Constant-velocity prediction on the translation only.
        c.tx += pose_.tx - prev_pose_.tx;
        c.ty += pose_.ty - prev_pose_.ty;
    }
    return c;
}

FrameResult Tracker::track_frame(const GrayImage& frame) {
    if (frame.width != frame_w_ || frame.height != frame_h_) {
        throw std::runtime_error("track_frame: frame size mismatch");
    }
    const auto t_total = Clock::now();
    frame_index_++;

    FrameResult res;
    res.frame_index = frame_index_;
    res.lost_level = expansion_level_;
    res.pose = pose_.normalized();

    auto t0 = Clock::now();
    const GradientField field = sobel_gradients(frame);
    res.timings.us_gradient = us_since(t0);

    // Subsampling is a speed trade-off for the search stage; it is disabled
    // while lost so re-detection uses the full model.
    const bool lost_now = expansion_level_ > 0 || !last_was_tracked_;
    ScoringPoints pts;
    const uint64_t perm_seed = mix_seed(cfg_.seed, 0x9042 + model_.version);
    if (cfg_.subsample_k > 0 && cfg_.subsample_k < static_cast<int>(model_.points.size()) &&
        !lost_now) {
        const auto subset = subsample_points(
            model_, cfg_.subsample_k, mix_seed(cfg_.seed, static_cast<uint64_t>(frame_index_)));
        pts = ScoringPoints::from_subset(model_, subset, perm_seed);
    } else {
        pts = ScoringPoints::from_model(model_, perm_seed);
    }
    res.points_used = static_cast<int>(pts.size());

    const SearchSpace space = make_search_space(model_, predicted_center(), expansion_level_,
                                                frame_w_, frame_h_, cfg_.search, cfg_.s_min);

    t0 = Clock::now();
    GridSearchOptions gopts;
    gopts.threads = cfg_.threads;
    gopts.interp = cfg_.search_interp;
    const GridSearchResult found = grid_search(pts, field, space, gopts);
    res.timings.us_search = us_since(t0);

    bool tracked = false;
    Pose refined;
    double final_score = 0.0;

    t0 = Clock::now();
    if (found.best) {
        const FacetResult facet = facet_refine(found.neighborhood);
        refined = facet.pose;

        // Match + least-squares rounds; a rank-deficient system keeps the
        // facet pose.
        for (int iter = 0; iter < cfg_.ls_iterations; ++iter) {
            const auto matches = find_normal_matches(model_, field, refined,
                                                     cfg_.refine_search_len, cfg_.cos_tol);
            if (matches.size() < 4) break;
            const auto solved = least_squares_pose(model_, matches, refined);
            if (!solved) break;
            refined = *solved;
        }
        refined = refined.normalized();

        // Re-score at the final pose so a refinement that slid off-target is
        // caught by the same gate.
        const ScoringPoints all = ScoringPoints::from_model(model_, perm_seed);
        final_score = score_at(all, field, refined, cfg_.refine_interp);
        tracked = final_score >= cfg_.s_min;
    }
    res.timings.us_refine = us_since(t0);

    if (tracked) {
        prev_pose_ = last_was_tracked_ ? pose_ : refined;
        pose_ = refined;
        last_was_tracked_ = true;
        expansion_level_ = 0;
        res.status = TrackStatus::Tracked;
        res.pose = refined;
        res.score = final_score;

        t0 = Clock::now();
        if (cfg_.enable_update) {
            update_points(model_, field, refined, cfg_.update);
            prune_points(model_, cfg_.update);
            resample_points(model_, field, refined, cfg_.update);
        }
        res.timings.us_update = us_since(t0);
    } else {
        last_was_tracked_ = false;
        expansion_level_ = std::min(expansion_level_ + 1, cfg_.max_expansion_level);
        res.status = TrackStatus::Lost;
        res.score = found.best ? final_score : 0.0;
    }

    res.timings.us_total = us_since(t_total);
    return res;
}

std::string frame_result_csv_row(const FrameResult& r, bool with_timing) {
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%d",
                          r.frame_index, to_string(r.status), r.pose.tx, r.pose.ty, r.pose.theta,
                          r.pose.sigma, r.score, r.points_used);
    if (with_timing) {
        n += std::snprintf(buf + n, sizeof(buf) - n, ",%lld",
                           static_cast<long long>(r.timings.us_total));
    }
    return std::string(buf, static_cast<size_t>(n));
}

}  // namespace shapetrack
