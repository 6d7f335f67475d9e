#include "powerloc/config.hpp"

#include "powerloc/io.hpp"

#include "config_json.hpp"

namespace powerloc {

namespace detail {

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void read_into(const json& value, const std::string& context, PreprocessConfig& out) {
    ObjectReader r(value, context);
    r.get("ma_window_s", out.ma_window_s);
    r.get("downsample_factor", out.downsample_factor);
    r.get("truncate_peaks", out.truncate_peaks);
    r.get("peak_z_cutoff", out.peak_z_cutoff);
    r.get("znormalize", out.znormalize);
    r.get_optional("percentile", out.percentile);
    r.finish();
}

json to_json(const PreprocessConfig& cfg) {
    json j;
    j["ma_window_s"] = cfg.ma_window_s;
    j["downsample_factor"] = cfg.downsample_factor;
    j["truncate_peaks"] = cfg.truncate_peaks;
    j["peak_z_cutoff"] = cfg.peak_z_cutoff;
    j["znormalize"] = cfg.znormalize;
    j["percentile"] = optional_json(cfg.percentile);
    return j;
}

void read_into(const json& value, const std::string& context, TrackerConfig& out) {
    ObjectReader r(value, context);
    if (const auto* pre = r.child("preprocess")) {
        read_into(*pre, context + ".preprocess", out.preprocess);
    }
    std::string matcher = out.matcher == Matcher::dtw ? "dtw" : "osb";
    r.get("matcher", matcher);
    if (matcher == "dtw") {
        out.matcher = Matcher::dtw;
    } else if (matcher == "osb") {
        out.matcher = Matcher::osb;
    } else {
        throw FormatError(context + ".matcher: expected \"dtw\" or \"osb\"");
    }
    r.get_optional("osb_jump_cost", out.osb_jump_cost);
    r.get("update_interval_s", out.update_interval_s);
    r.get("max_speed_mps", out.max_speed_mps);
    r.get_optional("max_disp_m", out.max_disp_m);
    r.get("threshold", out.threshold);
    r.get("error_bound_fraction", out.error_bound_fraction);
    r.get("convergence_dwell", out.convergence_dwell);
    r.finish();
}

json to_json(const TrackerConfig& cfg) {
    json j;
    j["preprocess"] = to_json(cfg.preprocess);
    j["matcher"] = cfg.matcher == Matcher::dtw ? "dtw" : "osb";
    j["osb_jump_cost"] = optional_json(cfg.osb_jump_cost);
    j["update_interval_s"] = cfg.update_interval_s;
    j["max_speed_mps"] = cfg.max_speed_mps;
    j["max_disp_m"] = optional_json(cfg.max_disp_m);
    j["threshold"] = cfg.threshold;
    j["error_bound_fraction"] = cfg.error_bound_fraction;
    j["convergence_dwell"] = cfg.convergence_dwell;
    return j;
}

void read_into(const json& value, const std::string& context, InferenceConfig& out) {
    ObjectReader r(value, context);
    if (const auto* pre = r.child("preprocess")) {
        read_into(*pre, context + ".preprocess", out.preprocess);
    }
    r.get("tau_s", out.tau_s);
    r.get("delta_margin", out.delta_margin);
    r.get("temperature_scale", out.temperature_scale);
    r.get_optional("fixed_temperature", out.fixed_temperature);
    r.get("particles", out.particles);
    r.get_optional("max_iterations", out.max_iterations);
    r.finish();
}

json to_json(const InferenceConfig& cfg) {
    json j;
    j["preprocess"] = to_json(cfg.preprocess);
    j["tau_s"] = cfg.tau_s;
    j["delta_margin"] = cfg.delta_margin;
    j["temperature_scale"] = cfg.temperature_scale;
    j["fixed_temperature"] = optional_json(cfg.fixed_temperature);
    j["particles"] = cfg.particles;
    j["max_iterations"] = optional_json(cfg.max_iterations);
    return j;
}

void read_into(const json& value, const std::string& context, WorldConfig& out) {
    ObjectReader r(value, context);
    r.get("seed", out.seed);
    if (const auto* stations = r.child("base_stations")) {
        if (!stations->is_array()) {
            throw FormatError(context + ".base_stations: expected an array");
        }
        out.base_stations.clear();
        for (const auto& s : *stations) {
            if (!s.is_array() || s.size() != 3) {
                throw FormatError(context + ".base_stations: expected [lat, lon, reference_dbm]");
            }
            try {
                out.base_stations.push_back(
                    {{s[0].get<double>(), s[1].get<double>()}, s[2].get<double>()});
            } catch (const json::exception& e) {
                throw FormatError(context + ".base_stations: " + e.what());
            }
        }
    }
    r.get("path_loss_exponent", out.path_loss_exponent);
    r.get("reference_distance_m", out.reference_distance_m);
    r.get("shadowing_sigma_db", out.shadowing_sigma_db);
    r.get("shadow_grid_m", out.shadow_grid_m);
    r.get("hysteresis_db", out.hysteresis_db);
    if (const auto* p = r.child("power")) {
        ObjectReader pr(*p, context + ".power");
        pr.get("base_draw_mw", out.power.base_draw_mw);
        pr.get("radio_coefficient_mw", out.power.radio_coefficient_mw);
        pr.get("best_signal_dbm", out.power.best_signal_dbm);
        pr.get("worst_signal_dbm", out.power.worst_signal_dbm);
        pr.get("worst_to_best_ratio", out.power.worst_to_best_ratio);
        pr.finish();
    }
    if (const auto* n = r.child("noise")) {
        ObjectReader nr(*n, context + ".noise");
        nr.get("gaussian_sigma_mw", out.noise.gaussian_sigma_mw);
        nr.get("transient_rate_hz", out.noise.transient_rate_hz);
        nr.get("transient_min_s", out.noise.transient_min_s);
        nr.get("transient_max_s", out.noise.transient_max_s);
        nr.get("transient_min_amplitude", out.noise.transient_min_amplitude);
        nr.get("transient_max_amplitude", out.noise.transient_max_amplitude);
        nr.finish();
    }
    if (const auto* d = r.child("drive")) {
        ObjectReader dr(*d, context + ".drive");
        dr.get("min_speed_mps", out.drive.min_speed_mps);
        dr.get("max_speed_mps", out.drive.max_speed_mps);
        dr.get("stop_probability", out.drive.stop_probability);
        dr.get("min_stop_s", out.drive.min_stop_s);
        dr.get("max_stop_s", out.drive.max_stop_s);
        dr.get("sample_period_s", out.drive.sample_period_s);
        dr.finish();
    }
    r.finish();
}

json to_json(const WorldConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["base_stations"] = json::array();
    for (const auto& s : cfg.base_stations) {
        j["base_stations"].push_back({s.position.lat, s.position.lon, s.reference_signal_dbm});
    }
    j["path_loss_exponent"] = cfg.path_loss_exponent;
    j["reference_distance_m"] = cfg.reference_distance_m;
    j["shadowing_sigma_db"] = cfg.shadowing_sigma_db;
    j["shadow_grid_m"] = cfg.shadow_grid_m;
    j["hysteresis_db"] = cfg.hysteresis_db;
    j["power"] = {{"base_draw_mw", cfg.power.base_draw_mw},
                  {"radio_coefficient_mw", cfg.power.radio_coefficient_mw},
                  {"best_signal_dbm", cfg.power.best_signal_dbm},
                  {"worst_signal_dbm", cfg.power.worst_signal_dbm},
                  {"worst_to_best_ratio", cfg.power.worst_to_best_ratio}};
    j["noise"] = {{"gaussian_sigma_mw", cfg.noise.gaussian_sigma_mw},
                  {"transient_rate_hz", cfg.noise.transient_rate_hz},
                  {"transient_min_s", cfg.noise.transient_min_s},
                  {"transient_max_s", cfg.noise.transient_max_s},
                  {"transient_min_amplitude", cfg.noise.transient_min_amplitude},
                  {"transient_max_amplitude", cfg.noise.transient_max_amplitude}};
    j["drive"] = {{"min_speed_mps", cfg.drive.min_speed_mps},
                  {"max_speed_mps", cfg.drive.max_speed_mps},
                  {"stop_probability", cfg.drive.stop_probability},
                  {"min_stop_s", cfg.drive.min_stop_s},
                  {"max_stop_s", cfg.drive.max_stop_s},
                  {"sample_period_s", cfg.drive.sample_period_s}};
    return j;
}

}  // namespace detail

void RunConfig::validate() const {
    preprocess.validate();
    tracker.validate();
    inference.validate();
    if (classifier.refs_per_route < 1 || classifier.iterations < 1) {
        throw std::invalid_argument("classifier: refs_per_route and iterations must be >= 1");
    }
    if (!(synthworld.station_spacing_m > 0.0)) {
        throw std::invalid_argument("synthworld: station_spacing_m must be > 0");
    }
    if (eval.baseline_trials < 1 || eval.min_segments < 1 ||
        eval.min_segments > eval.max_segments) {
        throw std::invalid_argument("eval: need baseline_trials >= 1 and 1 <= min <= max segments");
    }
}

RunConfig run_config_from_json(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw FormatError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    detail::ObjectReader r(doc, "config");
    r.get("seed", cfg.seed);
    if (const auto* v = r.child("preprocess")) {
        detail::read_into(*v, "config.preprocess", cfg.preprocess);
    }
    if (const auto* v = r.child("classifier")) {
        detail::ObjectReader c(*v, "config.classifier");
        c.get("refs_per_route", cfg.classifier.refs_per_route);
        c.get("iterations", cfg.classifier.iterations);
        c.finish();
    }
    if (const auto* v = r.child("tracker")) {
        detail::read_into(*v, "config.tracker", cfg.tracker);
    }
    if (const auto* v = r.child("route_inference")) {
        detail::read_into(*v, "config.route_inference", cfg.inference);
    }
    if (const auto* v = r.child("synthworld")) {
        detail::ObjectReader s(*v, "config.synthworld");
        if (const auto* w = s.child("world")) {
            detail::read_into(*w, "config.synthworld.world", cfg.synthworld.world);
        }
        s.get("station_spacing_m", cfg.synthworld.station_spacing_m);
        s.get("station_reference_dbm", cfg.synthworld.station_reference_dbm);
        s.get("segment_repetitions", cfg.synthworld.segment_repetitions);
        s.get("route_repetitions", cfg.synthworld.route_repetitions);
        s.finish();
    }
    if (const auto* v = r.child("eval")) {
        detail::ObjectReader e(*v, "config.eval");
        e.get("baseline_trials", cfg.eval.baseline_trials);
        e.get("min_segments", cfg.eval.min_segments);
        e.get("max_segments", cfg.eval.max_segments);
        e.finish();
    }
    r.finish();
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
    detail::json j;
    j["seed"] = cfg.seed;
    j["preprocess"] = detail::to_json(cfg.preprocess);
    j["classifier"] = {{"refs_per_route", cfg.classifier.refs_per_route},
                       {"iterations", cfg.classifier.iterations}};
    j["tracker"] = detail::to_json(cfg.tracker);
    j["route_inference"] = detail::to_json(cfg.inference);
    j["synthworld"] = {{"world", detail::to_json(cfg.synthworld.world)},
                       {"station_spacing_m", cfg.synthworld.station_spacing_m},
                       {"station_reference_dbm", cfg.synthworld.station_reference_dbm},
                       {"segment_repetitions", cfg.synthworld.segment_repetitions},
                       {"route_repetitions", cfg.synthworld.route_repetitions}};
    j["eval"] = {{"baseline_trials", cfg.eval.baseline_trials},
                 {"min_segments", cfg.eval.min_segments},
                 {"max_segments", cfg.eval.max_segments}};
    return j.dump(1) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(io::read_text_file(path));
}

}  // namespace powerloc
