#include "powerloc/tracker.hpp"

#include "powerloc/geo.hpp"
#include "powerloc/parallel.hpp"
#include "powerloc/similarity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace powerloc {

double TrackerConfig::effective_max_disp() const {
    return max_disp_m.value_or(1.5 * update_interval_s * max_speed_mps);
}

void TrackerConfig::validate() const {
    preprocess.validate();
    if (!(update_interval_s > 0.0)) {
        throw std::invalid_argument("tracker: update_interval_s must be > 0");
    }
    if (!(effective_max_disp() > 0.0)) {
        throw std::invalid_argument("tracker: max_disp must be > 0");
    }
    if (osb_jump_cost && !(*osb_jump_cost >= 0.0)) {
        throw std::invalid_argument("tracker: osb_jump_cost must be >= 0");
    }
    if (!(error_bound_fraction > 0.0)) {
        throw std::invalid_argument("tracker: error_bound_fraction must be > 0");
    }
}

std::vector<PreparedReference> prepare_tracking_references(const ReferenceLibrary& library,
                                                           const TrackerConfig& cfg,
                                                           unsigned jobs) {
    std::vector<std::pair<const std::string*, const PowerTrace*>> items;
    for (const auto& [label, list] : library.routes) {
        for (const auto& trace : list) {
            if (!trace.has_ground_truth()) {
                throw std::invalid_argument("tracker: reference for '" + label +
                                            "' has no coordinates");
            }
            items.emplace_back(&label, &trace);
        }
    }
    if (items.empty()) {
        throw std::invalid_argument("tracker: empty reference library");
    }
    std::vector<PreparedReference> out(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
        auto pre = preprocess(*items[i].second, cfg.preprocess);
        out[i].label = *items[i].first;
        out[i].series = std::move(pre.samples);
        out[i].positions = std::move(*pre.ground_truth);
    });
    return out;
}

double similarity_score(double normalized_distance) { return 1.0 / (1.0 + normalized_distance); }

namespace {

MatchSummary match(std::span<const double> query, std::span<const double> target,
                   const TrackerConfig& cfg) {
    if (cfg.matcher == Matcher::dtw) {
        return subsequence_dtw_summary(query, target);
    }
    const double jc = cfg.osb_jump_cost ? *cfg.osb_jump_cost : default_jump_cost(query, target);
    return osb_summary(query, target, jc, OsbMode::subsequence);
}

}  // namespace

TrackingEstimate estimate_location(const PowerTrace& accumulated,
                                   std::span<const PreparedReference> refs,
                                   const TrackerConfig& cfg, unsigned jobs) {
    if (accumulated.empty()) {
        throw std::invalid_argument("estimate_location: no samples");
    }
    if (refs.empty()) {
        throw std::invalid_argument("estimate_location: no references");
    }
    for (const auto& ref : refs) {
        if (ref.positions.size() != ref.series.size()) {
            throw std::invalid_argument("estimate_location: reference '" + ref.label +
                                        "' lacks coordinates");
        }
    }
    const auto query = preprocess(accumulated, cfg.preprocess);
    std::vector<MatchSummary> results(refs.size());
    parallel_for(refs.size(), jobs,
                 [&](std::size_t r) { results[r] = match(query.samples, refs[r].series, cfg); });

    std::size_t best = 0;
    for (std::size_t r = 1; r < refs.size(); ++r) {
        if (results[r].normalized_distance() < results[best].normalized_distance()) {
            best = r;
        }
    }
    TrackingEstimate est;
    est.t_s = accumulated.duration();
    est.route_label = refs[best].label;
    est.reference = best;
    est.end_offset = results[best].end_offset;
    est.position = refs[best].positions[est.end_offset];
    est.distance = results[best].normalized_distance();
    est.score = similarity_score(est.distance);
    return est;
}

TrackerState TrackerState::initial(const TrackerConfig& cfg) {
    TrackerState state;
    state.threshold = cfg.threshold;
    state.max_disp_m = cfg.effective_max_disp();
    return state;
}

TrackingEstimate apply_motion_model(TrackerState& state, TrackingEstimate raw) {
    TrackingEstimate out = raw;
    if (state.locked && state.last_estimate) {
        const double moved = haversine_distance(raw.position, state.last_estimate->position);
        if (moved > state.max_disp_m) {
            out = *state.last_estimate;
            out.t_s = raw.t_s;
            out.score = raw.score;
            out.distance = raw.distance;
            out.corrected = true;
        }
    }
    state.locked = raw.score > state.threshold;
    state.last_estimate = out;
    state.history.push_back(out);
    return out;
}

std::pair<TrackerState, TrackingEstimate> step_with_motion_model(
    TrackerState state, const PowerTrace& accumulated, std::span<const PreparedReference> refs,
    const TrackerConfig& cfg, unsigned jobs) {
    auto raw = estimate_location(accumulated, refs, cfg, jobs);
    auto out = apply_motion_model(state, std::move(raw));
    return {std::move(state), std::move(out)};
}

std::size_t tick_sample_count(const PowerTrace& stream, double interval_s, std::size_t tick) {
    const double t = interval_s * static_cast<double>(tick + 1);
    const auto count = static_cast<std::size_t>(std::llround(t / stream.sample_period));
    return std::min(count, stream.size());
}

std::vector<TrackingEstimate> track_raw(const PowerTrace& stream,
                                        std::span<const PreparedReference> refs,
                                        const TrackerConfig& cfg, unsigned jobs) {
    cfg.validate();
    const auto ticks =
        static_cast<std::size_t>(std::floor(stream.duration() / cfg.update_interval_s + 1e-9));
    std::vector<TrackingEstimate> out;
    out.reserve(ticks);
    PowerTrace prefix;
    prefix.sample_period = stream.sample_period;
    for (std::size_t k = 0; k < ticks; ++k) {
        const std::size_t count = tick_sample_count(stream, cfg.update_interval_s, k);
        prefix.samples.assign(stream.samples.begin(),
                              stream.samples.begin() + static_cast<std::ptrdiff_t>(count));
        out.push_back(estimate_location(prefix, refs, cfg, jobs));
    }
    return out;
}

std::vector<TrackingEstimate> apply_motion_model_series(std::span<const TrackingEstimate> raw,
                                                        const TrackerConfig& cfg) {
    auto state = TrackerState::initial(cfg);
    std::vector<TrackingEstimate> out;
    out.reserve(raw.size());
    for (const auto& est : raw) {
        out.push_back(apply_motion_model(state, est));
    }
    return out;
}

std::optional<std::size_t> convergence_tick(std::span<const double> errors, double bound,
                                            std::size_t dwell) {
    dwell = std::max<std::size_t>(dwell, 1);
    // A streak that reaches the end counts even if shorter than dwell.
    std::size_t streak_start = 0;
    std::size_t streak = 0;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (errors[k] < bound) {
            if (streak == 0) {
                streak_start = k;
            }
            ++streak;
            if (streak >= dwell) {
                return streak_start;
            }
        } else {
            streak = 0;
        }
    }
    if (streak > 0) {
        return streak_start;
    }
    return std::nullopt;
}

TrackingRun score_tracking(const PowerTrace& stream, std::vector<TrackingEstimate> estimates,
                           const TrackerConfig& cfg) {
    TrackingRun run;
    run.estimates = std::move(estimates);
    if (!stream.ground_truth) {
        return run;
    }
    const auto& truth = *stream.ground_truth;
    run.route_length_m = polyline_length(truth);
    run.error_bound_m = cfg.error_bound_fraction * run.route_length_m;
    run.errors_m.reserve(run.estimates.size());
    for (std::size_t k = 0; k < run.estimates.size(); ++k) {
        const std::size_t count = tick_sample_count(stream, cfg.update_interval_s, k);
        run.errors_m.push_back(haversine_distance(run.estimates[k].position, truth[count - 1]));
    }
    run.convergence_tick = convergence_tick(run.errors_m, run.error_bound_m, cfg.convergence_dwell);
    if (run.convergence_tick) {
        std::size_t below = 0;
        for (std::size_t k = *run.convergence_tick; k < run.errors_m.size(); ++k) {
            below += run.errors_m[k] < run.error_bound_m ? 1 : 0;
        }
        run.fraction_below_bound =
            static_cast<double>(below) /
            static_cast<double>(run.errors_m.size() - *run.convergence_tick);
    }
    return run;
}

TrackingRun run_tracking(const PowerTrace& stream, const ReferenceLibrary& library,
                         TrackerConfig cfg, TrackingVariant variant, unsigned jobs) {
    cfg.matcher = variant.matcher;
    const auto refs = prepare_tracking_references(library, cfg, jobs);
    auto estimates = track_raw(stream, refs, cfg, jobs);
    if (variant.motion_model) {
        estimates = apply_motion_model_series(estimates, cfg);
    }
    return score_tracking(stream, std::move(estimates), cfg);
}

}  // namespace powerloc
