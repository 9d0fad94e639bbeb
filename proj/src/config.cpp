#include "shapetrack/config.hpp"

#include <fstream>
#include <stdexcept>

namespace shapetrack {

namespace {

double as_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw std::runtime_error("config: " + key + " must be a number");
    return v.get<double>();
}

Interp parse_interp(const nlohmann::json& v, const std::string& key) {
    const std::string s = v.get<std::string>();
    if (s == "nearest") return Interp::Nearest;
    if (s == "bilinear") return Interp::Bilinear;
    throw std::runtime_error("config: " + key + " must be \"nearest\" or \"bilinear\"");
}

}  // namespace

double parse_angle_value(const nlohmann::json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        constexpr const char* kPrefix = "deg:";
        if (s.rfind(kPrefix, 0) == 0) {
            return std::stod(s.substr(4)) * kPi / 180.0;
        }
        throw std::runtime_error("config: angle strings must use the deg: prefix, got " + s);
    }
    return v.get<double>();
}

TrackerConfig apply_config_json(const nlohmann::json& flat, TrackerConfig cfg) {
    if (!flat.is_object()) throw std::runtime_error("config: expected a JSON object");
    for (const auto& [key, value] : flat.items()) {
        if (key == "tracker.s_min") cfg.s_min = as_number(value, key);
        else if (key == "tracker.subsample_k") cfg.subsample_k = value.get<int>();
        else if (key == "tracker.max_expansion_level") cfg.max_expansion_level = value.get<int>();
        else if (key == "tracker.ls_iterations") cfg.ls_iterations = value.get<int>();
        else if (key == "tracker.refine_search_len") cfg.refine_search_len = as_number(value, key);
        else if (key == "tracker.cos_tol") cfg.cos_tol = as_number(value, key);
        else if (key == "tracker.threads") cfg.threads = value.get<int>();
        else if (key == "tracker.seed") cfg.seed = value.get<uint64_t>();
        else if (key == "tracker.enable_update") cfg.enable_update = value.get<bool>();
        else if (key == "tracker.search_interp") cfg.search_interp = parse_interp(value, key);
        else if (key == "tracker.refine_interp") cfg.refine_interp = parse_interp(value, key);
        else if (key == "search.theta_range") cfg.search.theta_range = parse_angle_value(value);
        else if (key == "search.sigma_range") cfg.search.sigma_range = as_number(value, key);
        else if (key == "search.expansion_factor")
            cfg.search.expansion_factor = as_number(value, key);
        else if (key == "search.trans_radius")
            cfg.search.trans_radius_override = as_number(value, key);
        else if (key == "search.steps") {
            if (!value.is_array() || value.size() != 4) {
                throw std::runtime_error("config: search.steps must be [dx, dy, dtheta, dsigma]");
            }
            GridSteps steps;
            steps.dx = value[0].get<double>();
            steps.dy = value[1].get<double>();
            steps.dtheta = parse_angle_value(value[2]);
            steps.dsigma = value[3].get<double>();
            cfg.search.step_override = steps;
        }
        else if (key == "update.lambda") cfg.update.lambda = as_number(value, key);
        else if (key == "update.ema_alpha") cfg.update.ema_alpha = as_number(value, key);
        else if (key == "update.prune_below") cfg.update.prune_below = as_number(value, key);
        else if (key == "update.min_age_to_prune") cfg.update.min_age_to_prune = value.get<int>();
        else if (key == "update.resample_spacing")
            cfg.update.resample_spacing = as_number(value, key);
        else if (key == "update.max_points") cfg.update.max_points = value.get<int>();
        else if (key == "update.normal_search_len")
            cfg.update.normal_search_len = as_number(value, key);
        else if (key == "update.cos_tol") cfg.update.cos_tol = as_number(value, key);
        else if (key == "update.min_model_points")
            cfg.update.min_model_points = value.get<int>();
        else if (key == "model.min_points") cfg.model.min_points = value.get<int>();
        else if (key == "model.threshold_percentile")
            cfg.model.threshold_percentile = as_number(value, key);
        else if (key == "model.threshold_low_ratio")
            cfg.model.threshold_low_ratio = as_number(value, key);
        else if (key == "model.threshold_low" || key == "model.threshold_high") {
            Thresholds thr = cfg.model.thresholds.value_or(Thresholds{});
            if (key == "model.threshold_low") thr.low = as_number(value, key);
            else thr.high = as_number(value, key);
            cfg.model.thresholds = thr;
        }
        else throw std::runtime_error("config: unknown key " + key);
    }
    return cfg;
}

TrackerConfig load_config_file(const std::string& path, TrackerConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return apply_config_json(j, std::move(base));
}

nlohmann::json config_to_json(const TrackerConfig& cfg) {
    nlohmann::json j;
    j["tracker.s_min"] = cfg.s_min;
    j["tracker.subsample_k"] = cfg.subsample_k;
    j["tracker.max_expansion_level"] = cfg.max_expansion_level;
    j["tracker.ls_iterations"] = cfg.ls_iterations;
    j["tracker.refine_search_len"] = cfg.refine_search_len;
    j["tracker.cos_tol"] = cfg.cos_tol;
    j["tracker.threads"] = cfg.threads;
    j["tracker.seed"] = cfg.seed;
    j["tracker.enable_update"] = cfg.enable_update;
    j["tracker.search_interp"] = cfg.search_interp == Interp::Nearest ? "nearest" : "bilinear";
    j["tracker.refine_interp"] = cfg.refine_interp == Interp::Nearest ? "nearest" : "bilinear";
    j["search.theta_range"] = cfg.search.theta_range;
    j["search.sigma_range"] = cfg.search.sigma_range;
    j["search.expansion_factor"] = cfg.search.expansion_factor;
    if (cfg.search.trans_radius_override) {
        j["search.trans_radius"] = *cfg.search.trans_radius_override;
    }
    if (cfg.search.step_override) {
        const GridSteps& s = *cfg.search.step_override;
        j["search.steps"] = {s.dx, s.dy, s.dtheta, s.dsigma};
    }
    j["update.lambda"] = cfg.update.lambda;
    j["update.ema_alpha"] = cfg.update.ema_alpha;
    j["update.prune_below"] = cfg.update.prune_below;
    j["update.min_age_to_prune"] = cfg.update.min_age_to_prune;
    j["update.resample_spacing"] = cfg.update.resample_spacing;
    j["update.max_points"] = cfg.update.max_points;
    j["update.normal_search_len"] = cfg.update.normal_search_len;
    j["update.cos_tol"] = cfg.update.cos_tol;
    j["update.min_model_points"] = cfg.update.min_model_points;
    j["model.min_points"] = cfg.model.min_points;
    j["model.threshold_percentile"] = cfg.model.threshold_percentile;
    j["model.threshold_low_ratio"] = cfg.model.threshold_low_ratio;
    if (cfg.model.thresholds) {
        j["model.threshold_low"] = cfg.model.thresholds->low;
        j["model.threshold_high"] = cfg.model.thresholds->high;
    }
    return j;
}

}  // namespace shapetrack
