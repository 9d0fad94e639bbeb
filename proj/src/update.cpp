#include "shapetrack/update.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "shapetrack/refine.hpp"

namespace shapetrack {

UpdateStats update_points(ShapeModel& model, const GradientField& field, const Pose& pose,
                          const UpdateConfig& cfg) {
    UpdateStats stats;
    stats.total = static_cast<int>(model.points.size());

    const double lambda = std::clamp(cfg.lambda, 0.0, 1.0);
    for (size_t i = 0; i < model.points.size(); ++i) {
        ModelPoint& mp = model.points[i];
        const Vec2 p_prime = transform_point(mp.p, pose);
        const Vec2 n_hat = rotate_direction(mp.d, pose.theta);
        const auto match = find_normal_match(field, p_prime, n_hat, cfg.normal_search_len,
                                             cfg.cos_tol, static_cast<int>(i));
        const bool found = match.has_value();
        if (found) {
            ++stats.matched;
            if (lambda > 0.0) {
                // Blend toward the match, mapped back into model space.
                const Vec2 m = invert_point(match->q, pose);
                mp.p = mp.p + lambda * (m - mp.p);

                // Refresh the direction from the image gradient at the match,
                // back-rotated into model space, with the same blend on the
                // angle. Opposite polarity is not a rotation; flip first.
                Vec2 e = sample_direction(field, match->q, Interp::Bilinear);
                if (e.squared_norm() >= kZeroGradientEps * kZeroGradientEps) {
                    Vec2 d_img = rotate_direction(e.normalized(), -pose.theta);
                    if (d_img.dot(mp.d) < 0.0) d_img = -d_img;
                    const double delta = normalize_angle(d_img.angle() - mp.d.angle());
                    const double angle = mp.d.angle() + lambda * delta;
                    mp.d = {std::cos(angle), std::sin(angle)};
                }
            }
        }
        mp.found_ema = (1.0 - cfg.ema_alpha) * mp.found_ema + cfg.ema_alpha * (found ? 1.0 : 0.0);
        mp.age += 1;
    }
    if (lambda > 0.0) {
        model.version++;
        model.recompute_diag();
    }
    return stats;
}

int prune_points(ShapeModel& model, const UpdateConfig& cfg) {
    const int n = static_cast<int>(model.points.size());
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
        const ModelPoint& mp = model.points[static_cast<size_t>(i)];
        if (mp.found_ema < cfg.prune_below && mp.age >= cfg.min_age_to_prune) {
            candidates.push_back(i);
        }
    }
    // Never drop below the minimum model size: spare the healthiest
    // candidates when the budget is smaller than the candidate list.
    const int budget = std::max(0, n - cfg.min_model_points);
    if (static_cast<int>(candidates.size()) > budget) {
        std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            return model.points[static_cast<size_t>(a)].found_ema <
                   model.points[static_cast<size_t>(b)].found_ema;
        });
        candidates.resize(static_cast<size_t>(budget));
    }
    if (candidates.empty()) return 0;

    std::vector<bool> remove(static_cast<size_t>(n), false);
    for (int i : candidates) remove[static_cast<size_t>(i)] = true;
    std::vector<ModelPoint> kept;
    kept.reserve(static_cast<size_t>(n - static_cast<int>(candidates.size())));
    for (int i = 0; i < n; ++i) {
        if (!remove[static_cast<size_t>(i)]) kept.push_back(model.points[static_cast<size_t>(i)]);
    }
    model.points = std::move(kept);
    model.version++;
    model.recompute_diag();
    return static_cast<int>(candidates.size());
}

int resample_points(ShapeModel& model, const GradientField& field, const Pose& pose,
                    const UpdateConfig& cfg) {
    if (static_cast<int>(model.points.size()) >= cfg.max_points) return 0;

    // Search region: bounding box of the transformed model, slightly padded.
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    std::vector<Vec2> transformed;
    transformed.reserve(model.points.size());
    for (const auto& mp : model.points) {
        const Vec2 tp = transform_point(mp.p, pose);
        transformed.push_back(tp);
        min_x = std::min(min_x, tp.x);
        min_y = std::min(min_y, tp.y);
        max_x = std::max(max_x, tp.x);
        max_y = std::max(max_y, tp.y);
    }
    const double pad = 2.0 + cfg.resample_spacing;
    Rect region{min_x - pad, min_y - pad, (max_x - min_x) + 2.0 * pad, (max_y - min_y) + 2.0 * pad};
    region.x = std::max(region.x, 0.0);
    region.y = std::max(region.y, 0.0);
    region.w = std::min(region.w, field.width - region.x);
    region.h = std::min(region.h, field.height - region.y);
    if (region.w <= 0.0 || region.h <= 0.0) return 0;
    const Roi roi = Roi::rect(region);

    const auto thr = try_estimate_thresholds(field, &roi);
    if (!thr) return 0;
    const auto nms = nonmax_suppress(field, thr->low, thr->high, &roi);

    // Spatial hash over occupied image positions for the spacing test.
    const double spacing = std::max(cfg.resample_spacing, 1e-6);
    auto cell_of = [spacing](const Vec2& p) {
        return std::pair<int64_t, int64_t>{static_cast<int64_t>(std::floor(p.x / spacing)),
                                           static_cast<int64_t>(std::floor(p.y / spacing))};
    };
    auto key_of = [](int64_t kx, int64_t ky) { return (kx << 32) ^ (ky & 0xffffffff); };
    std::unordered_map<int64_t, std::vector<Vec2>> occupied;
    occupied.reserve(transformed.size() * 2);
    for (const auto& tp : transformed) {
        const auto [kx, ky] = cell_of(tp);
        occupied[key_of(kx, ky)].push_back(tp);
    }
    auto far_enough = [&](const Vec2& p) {
        const auto [kx, ky] = cell_of(p);
        for (int64_t dy = -1; dy <= 1; ++dy) {
            for (int64_t dx = -1; dx <= 1; ++dx) {
                const auto it = occupied.find(key_of(kx + dx, ky + dy));
                if (it == occupied.end()) continue;
                for (const Vec2& q : it->second) {
                    if ((q - p).squared_norm() < spacing * spacing) return false;
                }
            }
        }
        return true;
    };

    int added = 0;
    for (const auto& px : nms) {
        if (static_cast<int>(model.points.size()) >= cfg.max_points) break;
        const EdgePoint ep = refine_edge_subpixel(field, px);
        if (ep.dir.squared_norm() < 0.5) continue;
        if (!far_enough(ep.pos)) continue;

        ModelPoint mp;
        mp.p = invert_point(ep.pos, pose);
        mp.d = rotate_direction(ep.dir, -pose.theta);
        mp.found_ema = 1.0;
        mp.age = 0;
        model.points.push_back(mp);
        const auto [kx, ky] = cell_of(ep.pos);
        occupied[key_of(kx, ky)].push_back(ep.pos);
        ++added;
    }
    if (added > 0) {
        model.version++;
        model.recompute_diag();
    }
    return added;
}

}  // namespace shapetrack
