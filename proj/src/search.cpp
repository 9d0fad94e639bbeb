#include "shapetrack/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "shapetrack/rng.hpp"

namespace shapetrack {

namespace {

constexpr double kMinSigma = 1e-6;    // poses below this score 0 (degenerate)
constexpr double kCutoffSlack = 1e-9; // absorbs accumulation roundoff in the bound
constexpr double kGridEps = 1e-9;     // inclusive range/circle boundaries

}  // namespace

SearchSpace make_search_space(const ShapeModel& model, const Pose& predicted_center,
                              int expansion_level, int frame_width, int frame_height,
                              const SearchConfig& cfg, double s_min) {
    if (expansion_level < 0) throw std::runtime_error("make_search_space: negative level");

    SearchSpace sp;
    sp.center = predicted_center;
    sp.s_min = s_min;

    const double sigma_c = predicted_center.sigma;
    const double factor = std::pow(cfg.expansion_factor, expansion_level);

    double radius = cfg.trans_radius_override ? *cfg.trans_radius_override
                                              : sigma_c * model.diag * 0.5;
    GridSteps steps;
    if (cfg.step_override) {
        steps = *cfg.step_override;
    } else {
        // One grid step moves the farthest model point at most one pixel.
        const double arm = std::max(sigma_c * model.max_radius(), 1.0);
        steps.dx = 1.0;
        steps.dy = 1.0;
        steps.dtheta = std::asin(std::min(1.0, 1.0 / arm));
        steps.dsigma = 1.0 / arm;
    }

    radius *= factor;
    steps.dx *= factor;
    steps.dy *= factor;
    steps.dtheta *= factor;
    steps.dsigma *= factor;
    sp.theta_range = std::min(cfg.theta_range * factor, kPi);
    sp.sigma_range = std::min(cfg.sigma_range * factor, 0.9 * sigma_c);

    // The translation region is capped at the frame.
    const double frame_diag =
        0.5 * std::hypot(static_cast<double>(frame_width), static_cast<double>(frame_height));
    sp.trans_radius = std::min(radius, frame_diag);

    steps.dx = std::max(steps.dx, 1e-9);
    steps.dy = std::max(steps.dy, 1e-9);
    steps.dtheta = std::max(steps.dtheta, 1e-9);
    steps.dsigma = std::max(steps.dsigma, 1e-9);
    sp.steps = steps;
    return sp;
}

ScoringPoints ScoringPoints::from_model(const ShapeModel& model, uint64_t seed) {
    std::vector<int> indices(model.points.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
    return from_subset(model, indices, seed);
}

ScoringPoints ScoringPoints::from_subset(const ShapeModel& model, std::span<const int> indices,
                                         uint64_t seed) {
    std::vector<int> order(indices.begin(), indices.end());
    std::mt19937_64 rng(seed);
    rng_shuffle(std::span<int>(order), rng);

    ScoringPoints sp;
    sp.px.reserve(order.size());
    sp.py.reserve(order.size());
    sp.dx.reserve(order.size());
    sp.dy.reserve(order.size());
    for (int i : order) {
        const ModelPoint& mp = model.points[static_cast<size_t>(i)];
        sp.px.push_back(mp.p.x);
        sp.py.push_back(mp.p.y);
        sp.dx.push_back(mp.d.x);
        sp.dy.push_back(mp.d.y);
    }
    return sp;
}

namespace {

/// Shared scoring kernel. Model offsets and rotated directions are
/// precomputed per (theta, sigma); the loop accumulates terms in the fixed
/// ScoringPoints order so every caller produces bit-identical sums.
struct ComboScratch {
    std::vector<double> ox, oy;    // sigma R(theta) p_i
    std::vector<double> rdx, rdy;  // R(theta) d_i

    void prepare(const ScoringPoints& pts, double theta, double sigma) {
        const size_t n = pts.size();
        ox.resize(n);
        oy.resize(n);
        rdx.resize(n);
        rdy.resize(n);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (size_t j = 0; j < n; ++j) {
            ox[j] = sigma * (c * pts.px[j] - s * pts.py[j]);
            oy[j] = sigma * (s * pts.px[j] + c * pts.py[j]);
            rdx[j] = c * pts.dx[j] - s * pts.dy[j];
            rdy[j] = s * pts.dx[j] + c * pts.dy[j];
        }
    }
};

/// Accumulates the direction-dot sum at translation (tx, ty); aborts against
/// `threshold` = (s_min - slack) * n (never aborts when threshold <= 0).
/// Returns the evaluated term count in `terms`.
template <Interp kMode>
inline bool accumulate_terms(const ComboScratch& sc, const GradientField& field, double tx,
                             double ty, double threshold, double& sum_out, uint32_t& terms) {
    const size_t n = sc.ox.size();
    const int w = field.width;
    const int h = field.height;
    const double x_hi = w - 0.5;
    const double y_hi = h - 0.5;
    const double* gx = field.gx.data();
    const double* gy = field.gy.data();
    const double* amp = field.amp.data();

    double sum = 0.0;
    size_t j = 0;
    for (; j < n; ++j) {
        const double x = tx + sc.ox[j];
        const double y = ty + sc.oy[j];
        if constexpr (kMode == Interp::Nearest) {
            if (x > -0.5 && x < x_hi && y > -0.5 && y < y_hi) {
                const size_t i =
                    static_cast<size_t>(static_cast<int>(y + 0.5)) * w + static_cast<int>(x + 0.5);
                const double a = amp[i];
                if (a >= kZeroGradientEps) {
                    sum += (sc.rdx[j] * gx[i] + sc.rdy[j] * gy[i]) / a;
                }
            }
        } else {
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            if (x0 >= 0 && y0 >= 0 && x0 + 1 < w && y0 + 1 < h) {
                const double fx = x - x0;
                const double fy = y - y0;
                const size_t i00 = static_cast<size_t>(y0) * w + x0;
                const size_t i01 = i00 + w;
                const double w00 = (1.0 - fx) * (1.0 - fy);
                const double w10 = fx * (1.0 - fy);
                const double w01 = (1.0 - fx) * fy;
                const double w11 = fx * fy;
                const double ex =
                    w00 * gx[i00] + w10 * gx[i00 + 1] + w01 * gx[i01] + w11 * gx[i01 + 1];
                const double ey =
                    w00 * gy[i00] + w10 * gy[i00 + 1] + w01 * gy[i01] + w11 * gy[i01 + 1];
                const double a = std::sqrt(ex * ex + ey * ey);
                if (a >= kZeroGradientEps) {
                    sum += (sc.rdx[j] * ex + sc.rdy[j] * ey) / a;
                }
            }
        }
        // Best still reachable: |sum| plus 1 per remaining term.
        const double remaining = static_cast<double>(n - j - 1);
        if (std::fabs(sum) + remaining < threshold) {
            terms = static_cast<uint32_t>(j + 1);
            return false;
        }
    }
    terms = static_cast<uint32_t>(n);
    sum_out = sum;
    return true;
}

inline CutoffScore score_pose(const ComboScratch& sc, const GradientField& field, double tx,
                              double ty, double sigma, double s_min, Interp mode) {
    CutoffScore r;
    const size_t n = sc.ox.size();
    if (n == 0 || sigma < kMinSigma) {
        r.score = 0.0;
        r.terms = 0;
        r.rejected = s_min > 0.0;
        return r;
    }
    const double threshold = (s_min - kCutoffSlack) * static_cast<double>(n);
    double sum = 0.0;
    bool done;
    if (mode == Interp::Nearest) {
        done = accumulate_terms<Interp::Nearest>(sc, field, tx, ty, threshold, sum, r.terms);
    } else {
        done = accumulate_terms<Interp::Bilinear>(sc, field, tx, ty, threshold, sum, r.terms);
    }
    if (!done) {
        r.rejected = true;
        return r;
    }
    r.score = std::fabs(sum) / static_cast<double>(n);
    return r;
}

}  // namespace

double score_at(const ScoringPoints& pts, const GradientField& field, const Pose& pose,
                Interp mode) {
    ComboScratch sc;
    sc.prepare(pts, pose.theta, pose.sigma);
    return score_pose(sc, field, pose.tx, pose.ty, pose.sigma, 0.0, mode).score;
}

CutoffScore score_at_with_cutoff(const ScoringPoints& pts, const GradientField& field,
                                 const Pose& pose, double s_min, Interp mode) {
    ComboScratch sc;
    sc.prepare(pts, pose.theta, pose.sigma);
    return score_pose(sc, field, pose.tx, pose.ty, pose.sigma, s_min, mode);
}

namespace {

struct GridBest {
    bool valid = false;
    double score = -1.0;
    double dist2 = 0.0;
    int ix = 0, iy = 0, it = 0, is = 0;

    /// Total order: higher score, then closer to the search center, then
    /// enumeration order (it, is, iy, ix).
    bool better_than(const GridBest& o) const {
        if (!o.valid) return valid;
        if (!valid) return false;
        if (score != o.score) return score > o.score;
        if (dist2 != o.dist2) return dist2 < o.dist2;
        if (it != o.it) return it < o.it;
        if (is != o.is) return is < o.is;
        if (iy != o.iy) return iy < o.iy;
        return ix < o.ix;
    }
};

struct GridTask {
    int it = 0, is = 0;
    int iy_begin = 0, iy_end = 0;  // inclusive range
};

struct TaskOutcome {
    GridBest best;
    std::vector<Candidate> candidates;
    uint64_t poses = 0;
    uint64_t terms = 0;
};

inline Pose grid_pose(const SearchSpace& sp, int ix, int iy, int it, int is) {
    return {sp.center.tx + ix * sp.steps.dx, sp.center.ty + iy * sp.steps.dy,
            sp.center.theta + it * sp.steps.dtheta, sp.center.sigma + is * sp.steps.dsigma};
}

inline int half_count(double range, double step) {
    return range > 0.0 ? static_cast<int>(std::floor(range / step + kGridEps)) : 0;
}

/// Largest |ix| with (ix dx)^2 + (iy dy)^2 <= r^2.
inline int row_halfwidth(double radius, double y_off, double dx) {
    const double rem = radius * radius - y_off * y_off;
    if (rem < 0.0) return -1;
    return static_cast<int>(std::floor(std::sqrt(rem) / dx + kGridEps));
}

}  // namespace

GridSearchResult grid_search(const ScoringPoints& pts, const GradientField& field,
                             const SearchSpace& space, const GridSearchOptions& opts) {
    if (pts.size() == 0) throw std::runtime_error("grid_search: empty model");

    const int mt = half_count(space.theta_range, space.steps.dtheta);
    const int ms = half_count(space.sigma_range, space.steps.dsigma);
    const int my = half_count(space.trans_radius, space.steps.dy);

    // Flat, deterministic task list: each (theta, sigma) combo split into
    // row bands so a single-combo search still parallelizes.
    int threads = opts.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, threads);
    const int combos = (2 * mt + 1) * (2 * ms + 1);
    const int rows = 2 * my + 1;
    int band = rows;
    if (threads > 1 && combos < 4 * threads) {
        band = std::max(1, rows / (4 * threads));
    }

    std::vector<GridTask> tasks;
    for (int it = -mt; it <= mt; ++it) {
        for (int is = -ms; is <= ms; ++is) {
            for (int y0 = -my; y0 <= my; y0 += band) {
                tasks.push_back({it, is, y0, std::min(my, y0 + band - 1)});
            }
        }
    }

    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<size_t> next_task{0};

    auto worker = [&]() {
        ComboScratch scratch;
        int prepared_it = INT32_MIN, prepared_is = INT32_MIN;
        for (;;) {
            const size_t ti = next_task.fetch_add(1, std::memory_order_relaxed);
            if (ti >= tasks.size()) break;
            const GridTask& task = tasks[ti];
            TaskOutcome& out = outcomes[ti];

            const double sigma = space.center.sigma + task.is * space.steps.dsigma;
            if (sigma < kMinSigma) continue;
            if (task.it != prepared_it || task.is != prepared_is) {
                scratch.prepare(pts, space.center.theta + task.it * space.steps.dtheta, sigma);
                prepared_it = task.it;
                prepared_is = task.is;
            }

            for (int iy = task.iy_begin; iy <= task.iy_end; ++iy) {
                const double y_off = iy * space.steps.dy;
                const int mx = row_halfwidth(space.trans_radius, y_off, space.steps.dx);
                for (int ix = -mx; ix <= mx; ++ix) {
                    const double x_off = ix * space.steps.dx;
                    const CutoffScore cs =
                        score_pose(scratch, field, space.center.tx + x_off,
                                   space.center.ty + y_off, sigma, space.s_min, opts.interp);
                    out.poses++;
                    out.terms += cs.terms;
                    if (cs.rejected || cs.score < space.s_min) continue;

                    GridBest gb;
                    gb.valid = true;
                    gb.score = cs.score;
                    gb.dist2 = x_off * x_off + y_off * y_off;
                    gb.ix = ix;
                    gb.iy = iy;
                    gb.it = task.it;
                    gb.is = task.is;
                    if (gb.better_than(out.best)) out.best = gb;
                    if (opts.collect_candidates) {
                        out.candidates.push_back(
                            {grid_pose(space, ix, iy, task.it, task.is), cs.score});
                    }
                }
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    GridSearchResult result;
    GridBest best;
    for (const auto& out : outcomes) {
        result.poses_evaluated += out.poses;
        result.terms_evaluated += out.terms;
        if (out.best.better_than(best)) best = out.best;
    }
    if (opts.collect_candidates) {
        for (auto& out : outcomes) {
            result.candidates.insert(result.candidates.end(), out.candidates.begin(),
                                     out.candidates.end());
        }
    }
    if (!best.valid) return result;

    result.best = Candidate{grid_pose(space, best.ix, best.iy, best.it, best.is), best.score};

    // Fresh 3^4 neighborhood around the winner, no cutoff; cells beyond the
    // enumerated grid are evaluated on demand.
    ScoreNeighborhood nb;
    nb.steps = space.steps;
    nb.center_pose = result.best->pose;
    ComboScratch scratch;
    for (int is = -1; is <= 1; ++is) {
        for (int it = -1; it <= 1; ++it) {
            const Pose base = grid_pose(space, 0, 0, best.it + it, best.is + is);
            if (base.sigma < kMinSigma) {
                for (int iy = -1; iy <= 1; ++iy)
                    for (int ix = -1; ix <= 1; ++ix)
                        nb.values[ScoreNeighborhood::index(ix, iy, it, is)] = 0.0;
                continue;
            }
            scratch.prepare(pts, base.theta, base.sigma);
            for (int iy = -1; iy <= 1; ++iy) {
                for (int ix = -1; ix <= 1; ++ix) {
                    const Pose p = grid_pose(space, best.ix + ix, best.iy + iy, best.it + it,
                                             best.is + is);
                    nb.values[ScoreNeighborhood::index(ix, iy, it, is)] =
                        score_pose(scratch, field, p.tx, p.ty, p.sigma, 0.0, opts.interp).score;
                }
            }
        }
    }
    result.neighborhood = nb;
    return result;
}

}  // namespace shapetrack
