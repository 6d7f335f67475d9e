#include "powerloc/hmm.hpp"

#include "powerloc/parallel.hpp"
#include "powerloc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace powerloc {

namespace {

constexpr double kTimeEps = 1e-9;

std::string describe(const std::vector<Triple>& missing) {
    std::string text = "segment library does not cover " + std::to_string(missing.size()) +
                       " triple(s):";
    for (const auto& t : missing) {
        text += " " + t.to_string();
    }
    return text;
}

PreprocessConfig whole_trace_stages(const PreprocessConfig& cfg) {
    PreprocessConfig out = cfg;
    out.truncate_peaks = false;
    out.znormalize = false;
    out.percentile.reset();
    return out;
}

}  // namespace

void InferenceConfig::validate() const {
    preprocess.validate();
    if (!(tau_s > 0.0)) {
        throw std::invalid_argument("inference: tau_s must be > 0");
    }
    if (!(delta_margin >= 0.0 && delta_margin < 1.0)) {
        throw std::invalid_argument("inference: delta_margin must be in [0, 1)");
    }
    if (!(temperature_scale > 0.0)) {
        throw std::invalid_argument("inference: temperature_scale must be > 0");
    }
    if (fixed_temperature && !(*fixed_temperature > 0.0)) {
        throw std::invalid_argument("inference: fixed_temperature must be > 0");
    }
    if (particles < 1) {
        throw std::invalid_argument("inference: particles must be >= 1");
    }
}

CoverageError::CoverageError(std::vector<Triple> missing)
    : std::runtime_error(describe(missing)), missing_(std::move(missing)) {}

std::vector<IntersectionId> feasible_next(const RoadGraph& graph, IntersectionId x,
                                          IntersectionId y) {
    auto next = graph.successors(y);
    std::erase(next, x);
    return next;
}

std::vector<std::pair<IntersectionId, double>> HmmModel::next_distribution(IntersectionId x,
                                                                           IntersectionId y) const {
    std::vector<std::pair<IntersectionId, double>> out;
    for (auto it = transitions.lower_bound(Triple{x, y, std::numeric_limits<IntersectionId>::min()});
         it != transitions.end() && it->first.prev == x && it->first.from == y; ++it) {
        out.emplace_back(it->first.to, it->second);
    }
    return out;
}

std::vector<std::pair<IntersectionId, double>> HmmModel::first_distribution() const {
    std::vector<std::pair<IntersectionId, double>> out;
    for (const auto& [key, p] : initial) {
        out.emplace_back(key.second, p);
    }
    return out;
}

const std::vector<std::vector<double>>& HmmModel::recordings_for(const Triple& t) const {
    const auto it = recordings.find(t);
    if (it == recordings.end()) {
        throw CoverageError({t});
    }
    return it->second;
}

double HmmModel::min_delta() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [key, b] : delta_bounds) {
        best = std::min(best, b.min_s);
    }
    return best;
}

HmmModel build_model(const RoadGraph& graph, const ReferenceLibrary& library, IntersectionId start,
                     const InferenceConfig& cfg, std::optional<std::size_t> steps, unsigned jobs) {
    cfg.validate();
    graph.validate();
    if (!graph.has_intersection(start)) {
        throw std::invalid_argument("build_model: unknown start intersection " +
                                    std::to_string(start));
    }
    HmmModel model;
    model.graph = graph;
    model.start = start;
    model.config = cfg;

    for (const auto& [key, seg] : graph.segments()) {
        const auto [x, y] = key;
        const auto next = feasible_next(graph, x, y);
        if (next.empty()) {
            model.terminal.insert(key);
        }
        for (IntersectionId z : next) {
            model.transitions[Triple{x, y, z}] = 1.0 / static_cast<double>(next.size());
        }
    }
    const auto first = graph.successors(start);
    if (first.empty()) {
        throw InferenceError("build_model: no segment leaves intersection " + std::to_string(start));
    }
    for (IntersectionId y : first) {
        model.initial[{start, y}] = 1.0 / static_cast<double>(first.size());
    }

    // Which triples the filter can reach.
    std::set<Triple> needed;
    std::set<SegmentKey> first_segments;
    std::map<SegmentKey, std::size_t> depth;
    std::deque<SegmentKey> queue;
    for (IntersectionId y : first) {
        first_segments.insert({start, y});
        depth[{start, y}] = 1;
        queue.emplace_back(start, y);
    }
    while (!queue.empty()) {
        const auto state = queue.front();
        queue.pop_front();
        const std::size_t d = depth[state];
        if (steps && d >= *steps) {
            continue;
        }
        for (IntersectionId z : feasible_next(graph, state.first, state.second)) {
            needed.insert(Triple{state.first, state.second, z});
            const SegmentKey next{state.second, z};
            if (!depth.contains(next)) {
                depth[next] = d + 1;
                queue.push_back(next);
            }
        }
    }

    std::map<SegmentKey, std::vector<const PowerTrace*>> by_segment;
    for (const auto& [triple, list] : library.segments) {
        for (const auto& trace : list) {
            by_segment[{triple.from, triple.to}].push_back(&trace);
        }
    }
    std::vector<Triple> missing;
    for (const auto& key : first_segments) {
        if (!by_segment.contains(key)) {
            missing.push_back(Triple{kNoIntersection, key.first, key.second});
        }
    }
    for (const auto& t : needed) {
        if (!library.segments.contains(t)) {
            missing.push_back(t);
        }
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw CoverageError(std::move(missing));
    }

    for (const auto& [key, list] : by_segment) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto* trace : list) {
            lo = std::min(lo, trace->duration());
            hi = std::max(hi, trace->duration());
        }
        if (!(lo > 0.0)) {
            throw FormatError("segment recording for " + std::to_string(key.first) + "-" +
                              std::to_string(key.second) + " is empty");
        }
        model.delta_bounds[key] = {lo * (1.0 - cfg.delta_margin), hi * (1.0 + cfg.delta_margin)};
    }

    // Preprocess the recordings the model can use.
    std::vector<std::pair<Triple, const PowerTrace*>> work;
    for (const auto& t : needed) {
        for (const auto& trace : library.segments.at(t)) {
            work.emplace_back(t, &trace);
        }
    }
    for (const auto& key : first_segments) {
        for (const auto* trace : by_segment.at(key)) {
            work.emplace_back(Triple{kNoIntersection, key.first, key.second}, trace);
        }
    }
    std::vector<std::vector<double>> prepared(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t i) {
        prepared[i] = preprocess(*work[i].second, cfg.preprocess).samples;
    });
    for (std::size_t i = 0; i < work.size(); ++i) {
        model.recordings[work[i].first].push_back(std::move(prepared[i]));
    }
    return model;
}

PreparedObservation prepare_observation(const PowerTrace& observation, const InferenceConfig& cfg) {
    if (observation.empty()) {
        throw std::invalid_argument("prepare_observation: empty observation");
    }
    auto pre = preprocess(observation, whole_trace_stages(cfg.preprocess));
    PreparedObservation out;
    out.series = std::move(pre.samples);
    out.sample_period = pre.sample_period;
    out.t_max = observation.duration();
    return out;
}

void condition_slice(std::vector<double>& slice, const PreprocessConfig& cfg) {
    if (slice.empty()) {
        return;
    }
    if (cfg.truncate_peaks) {
        const auto m = moments(slice);
        const double lo = m.mean - cfg.peak_z_cutoff * m.stddev;
        const double hi = m.mean + cfg.peak_z_cutoff * m.stddev;
        for (double& v : slice) {
            v = std::clamp(v, lo, hi);
        }
    }
    if (cfg.znormalize) {
        znormalize_in_place(slice);
    }
    if (cfg.percentile) {
        percentile_threshold_in_place(slice, *cfg.percentile);
    }
}

std::vector<double> candidate_durations(const HmmModel& model, SegmentKey segment, double t_end,
                                        double t_max) {
    const auto it = model.delta_bounds.find(segment);
    if (it == model.delta_bounds.end()) {
        throw CoverageError({Triple{kNoIntersection, segment.first, segment.second}});
    }
    const auto [lo, hi] = it->second;
    const double tau = model.config.tau_s;
    const double remaining = t_max - t_end;
    std::vector<double> out;
    if (remaining + kTimeEps < lo) {
        return out;
    }
    auto k_lo = static_cast<long long>(std::ceil(lo / tau - kTimeEps));
    auto k_hi = static_cast<long long>(std::floor(hi / tau + kTimeEps));
    k_lo = std::max(k_lo, 1LL);
    k_hi = std::max(k_hi, k_lo);
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double d = static_cast<double>(k) * tau;
        if (d >= remaining - kTimeEps) {
            out.push_back(remaining);
            break;
        }
        out.push_back(d);
    }
    return out;
}

std::optional<SegmentWeight> segment_likelihood_weight(const PreparedObservation& observation,
                                                       double t_end, const Triple& triple,
                                                       const HmmModel& model) {
    if (!(t_end < observation.t_max)) {
        return std::nullopt;
    }
    const auto durations =
        candidate_durations(model, {triple.from, triple.to}, t_end, observation.t_max);
    if (durations.empty()) {
        return std::nullopt;
    }
    const auto& refs = model.recordings_for(triple);
    const double p = observation.sample_period;
    const auto n = observation.series.size();
    const auto begin = std::min(
        static_cast<std::size_t>(std::max(0.0, std::floor(t_end / p + kTimeEps))), n);

    std::optional<SegmentWeight> best;
    std::vector<double> slice;
    for (double d : durations) {
        const auto end = std::min(
            static_cast<std::size_t>(std::max(0.0, std::ceil((t_end + d) / p - kTimeEps))), n);
        if (end <= begin) {
            continue;
        }
        slice.assign(observation.series.begin() + static_cast<std::ptrdiff_t>(begin),
                     observation.series.begin() + static_cast<std::ptrdiff_t>(end));
        condition_slice(slice, model.config.preprocess);
        for (const auto& ref : refs) {
            if (ref.empty()) {
                continue;
            }
            const double cost = normalized_dtw(slice, ref);
            if (!best || cost < best->cost) {
                best = SegmentWeight{cost, d};
            }
        }
    }
    return best;
}

}  // namespace powerloc
