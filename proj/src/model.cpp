#include "shapetrack/model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "shapetrack/rng.hpp"

namespace shapetrack {

double ShapeModel::max_radius() const {
    double r2 = 0.0;
    for (const auto& mp : points) r2 = std::max(r2, mp.p.squared_norm());
    return std::sqrt(r2);
}

void ShapeModel::recompute_diag() {
    if (points.empty()) {
        diag = 0.0;
        return;
    }
    double min_x = points[0].p.x, max_x = min_x;
    double min_y = points[0].p.y, max_y = min_y;
    for (const auto& mp : points) {
        min_x = std::min(min_x, mp.p.x);
        max_x = std::max(max_x, mp.p.x);
        min_y = std::min(min_y, mp.p.y);
        max_y = std::max(max_y, mp.p.y);
    }
    const double w = max_x - min_x;
    const double h = max_y - min_y;
    diag = std::sqrt(w * w + h * h);
}

ShapeModel build_model(const GradientField& field, const Roi& roi, const ModelBuildOptions& opts) {
    if (!roi.intersects_image(field.width, field.height)) {
        throw std::runtime_error("build_model: ROI does not intersect the image");
    }

    Thresholds thr;
    if (opts.thresholds) {
        thr = *opts.thresholds;
    } else {
        auto t = try_estimate_thresholds(field, &roi, opts.threshold_percentile,
                                         opts.threshold_low_ratio);
        if (!t) throw std::runtime_error("build_model: featureless ROI");
        thr = *t;
    }

    const auto candidates = nonmax_suppress(field, thr.low, thr.high, &roi);

    ShapeModel model;
    model.roi_bbox = roi.bounding_box();
    model.ref_point = model.roi_bbox.center();
    model.points.reserve(candidates.size());
    for (const auto& c : candidates) {
        const EdgePoint ep = refine_edge_subpixel(field, c);
        if (ep.dir.squared_norm() < 0.5) continue;  // no usable direction
        ModelPoint mp;
        mp.p = ep.pos - model.ref_point;
        mp.d = ep.dir;
        model.points.push_back(mp);
    }

    if (static_cast<int>(model.points.size()) < opts.min_points) {
        throw std::runtime_error("build_model: untrackable ROI, only " +
                                 std::to_string(model.points.size()) + " edge points (need " +
                                 std::to_string(opts.min_points) + ")");
    }
    model.recompute_diag();
    return model;
}

std::vector<int> subsample_points(const ShapeModel& model, int k, uint64_t seed) {
    const int n = static_cast<int>(model.points.size());
    std::vector<int> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    if (k >= n) return indices;
    if (k < 1) k = 1;

    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: first k entries form the uniform subset.
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng_below(rng, static_cast<uint64_t>(n - i)));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end());
    return indices;
}

namespace {
constexpr const char* kModelFormat = "shapetrack-model";
constexpr int kModelVersion = 1;
}  // namespace

std::string model_to_json(const ShapeModel& model) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["format_version"] = kModelVersion;
    j["ref_point"] = {model.ref_point.x, model.ref_point.y};
    j["diag"] = model.diag;
    j["roi_bbox"] = {model.roi_bbox.x, model.roi_bbox.y, model.roi_bbox.w, model.roi_bbox.h};
    j["model_version"] = model.version;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& mp : model.points) {
        pts.push_back({{"p", {mp.p.x, mp.p.y}},
                       {"d", {mp.d.x, mp.d.y}},
                       {"found_ema", mp.found_ema},
                       {"age", mp.age}});
    }
    j["points"] = std::move(pts);
    return j.dump(2);
}

ShapeModel model_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.value("format", "") != kModelFormat) {
        throw std::runtime_error("model_from_json: not a shapetrack model document");
    }
    if (j.value("format_version", -1) != kModelVersion) {
        throw std::runtime_error("model_from_json: unsupported format version");
    }
    ShapeModel model;
    model.ref_point = {j["ref_point"][0].get<double>(), j["ref_point"][1].get<double>()};
    model.diag = j["diag"].get<double>();
    model.roi_bbox = {j["roi_bbox"][0].get<double>(), j["roi_bbox"][1].get<double>(),
                      j["roi_bbox"][2].get<double>(), j["roi_bbox"][3].get<double>()};
    model.version = j.value("model_version", 0ull);
    for (const auto& p : j["points"]) {
        ModelPoint mp;
        mp.p = {p["p"][0].get<double>(), p["p"][1].get<double>()};
        mp.d = {p["d"][0].get<double>(), p["d"][1].get<double>()};
        mp.found_ema = p["found_ema"].get<double>();
        mp.age = p["age"].get<int>();
        model.points.push_back(mp);
    }
    if (model.points.empty()) throw std::runtime_error("model_from_json: empty point set");
    return model;
}

void save_model(const ShapeModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << model_to_json(model) << "\n";
}

ShapeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace shapetrack
