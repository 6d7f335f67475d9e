#include "powerloc/types.hpp"

#include "powerloc/geo.hpp"

#include <algorithm>
#include <limits>
#include <charconv>
#include <cmath>
#include <sstream>

namespace powerloc {

void PowerTrace::validate(bool require_nonnegative) const {
    if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
        throw FormatError("trace: sample_period must be positive");
    }
    if (samples.empty()) {
        throw FormatError("trace: no samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw FormatError("trace: non-finite sample at index " + std::to_string(i));
        }
        if (require_nonnegative && samples[i] < 0.0) {
            throw FormatError("trace: negative power at index " + std::to_string(i));
        }
    }
    if (ground_truth && ground_truth->size() != samples.size()) {
        throw FormatError("trace: ground truth has " + std::to_string(ground_truth->size()) +
                          " points for " + std::to_string(samples.size()) + " samples");
    }
}

void RoadGraph::add_intersection(IntersectionId id, LatLon position) {
    if (id < 0) {
        throw FormatError("graph: intersection ids must be non-negative");
    }
    intersections_[id] = position;
}

void RoadGraph::add_segment(Segment segment) {
    if (segment.from == segment.to) {
        throw FormatError("graph: self-loop at " + std::to_string(segment.from));
    }
    if (!has_intersection(segment.from) || !has_intersection(segment.to)) {
        throw FormatError("graph: segment " + std::to_string(segment.from) + "->" +
                          std::to_string(segment.to) + " references an unknown intersection");
    }
    if (segment.polyline.empty()) {
        segment.polyline = {position(segment.from), position(segment.to)};
    }
    if (segment.length_m <= 0.0) {
        segment.length_m = polyline_length(segment.polyline);
    }
    const double straight = haversine_distance(position(segment.from), position(segment.to));
    if (segment.length_m + 1e-6 < straight) {
        throw FormatError("graph: segment " + std::to_string(segment.from) + "->" +
                          std::to_string(segment.to) + " shorter than its endpoint distance");
    }
    segments_[{segment.from, segment.to}] = std::move(segment);
}

bool RoadGraph::has_intersection(IntersectionId id) const { return intersections_.contains(id); }

bool RoadGraph::has_segment(IntersectionId from, IntersectionId to) const {
    return segments_.contains({from, to});
}

const Segment& RoadGraph::segment(IntersectionId from, IntersectionId to) const {
    auto it = segments_.find({from, to});
    if (it == segments_.end()) {
        throw std::out_of_range("no segment " + std::to_string(from) + "->" + std::to_string(to));
    }
    return it->second;
}

LatLon RoadGraph::position(IntersectionId id) const {
    auto it = intersections_.find(id);
    if (it == intersections_.end()) {
        throw std::out_of_range("no intersection " + std::to_string(id));
    }
    return it->second;
}

std::vector<IntersectionId> RoadGraph::successors(IntersectionId id) const {
    std::vector<IntersectionId> out;
    for (auto it = segments_.lower_bound({id, std::numeric_limits<IntersectionId>::min()});
         it != segments_.end() && it->first.first == id; ++it) {
        out.push_back(it->first.second);
    }
    return out;
}

std::vector<IntersectionId> RoadGraph::predecessors(IntersectionId id) const {
    std::vector<IntersectionId> out;
    for (const auto& [key, seg] : segments_) {
        if (key.second == id) {
            out.push_back(key.first);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void RoadGraph::validate() const {
    for (const auto& [key, seg] : segments_) {
        if (key.first == key.second) {
            throw FormatError("graph: self-loop at " + std::to_string(key.first));
        }
        if (!has_intersection(key.first) || !has_intersection(key.second)) {
            throw FormatError("graph: dangling segment endpoint");
        }
        if (!(seg.length_m > 0.0)) {
            throw FormatError("graph: non-positive segment length");
        }
        const double straight = haversine_distance(position(key.first), position(key.second));
        if (seg.length_m + 1e-6 < straight) {
            throw FormatError("graph: segment shorter than its endpoint distance");
        }
    }
}

std::string Route::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i != 0) {
            out += '-';
        }
        out += std::to_string(nodes[i]);
    }
    return out;
}

Route Route::parse(const std::string& text) {
    Route route;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find_first_of("-, ", pos);
        if (next == std::string::npos) {
            next = text.size();
        }
        if (next > pos) {
            IntersectionId id = 0;
            const char* first = text.data() + pos;
            const char* last = text.data() + next;
            auto [ptr, ec] = std::from_chars(first, last, id);
            if (ec != std::errc{} || ptr != last || id < 0) {
                throw FormatError("route: bad intersection id in '" + text + "'");
            }
            route.nodes.push_back(id);
        }
        pos = next + 1;
    }
    if (route.nodes.empty()) {
        throw FormatError("route: empty");
    }
    return route;
}

void TimedRoute::validate() const {
    if (boundary_times.size() != route.segment_count()) {
        throw FormatError("timed route: one boundary time per segment required");
    }
    double prev = 0.0;
    for (double t : boundary_times) {
        if (!(t > prev)) {
            throw FormatError("timed route: boundary times must be strictly increasing");
        }
        prev = t;
    }
}

std::string Triple::to_string() const {
    return (prev == kNoIntersection ? std::string("s") : std::to_string(prev)) + "_" +
           std::to_string(from) + "_" + std::to_string(to);
}

void ReferenceLibrary::validate(const RoadGraph* graph) const {
    for (const auto& [label, traces] : routes) {
        if (traces.empty()) {
            throw FormatError("library: route '" + label + "' has no traces");
        }
    }
    for (const auto& [key, traces] : segments) {
        if (traces.empty()) {
            throw FormatError("library: triple " + key.to_string() + " has no traces");
        }
        if (graph != nullptr) {
            const bool entry_ok =
                key.prev == kNoIntersection || graph->has_segment(key.prev, key.from);
            if (!entry_ok || !graph->has_segment(key.from, key.to)) {
                throw FormatError("library: triple " + key.to_string() +
                                  " is not a pair of graph segments");
            }
        }
    }
}

std::optional<RouteViolation> validate_route(const RoadGraph& graph, const Route& route) {
    for (std::size_t i = 0; i + 1 < route.nodes.size(); ++i) {
        if (!graph.has_segment(route.nodes[i], route.nodes[i + 1])) {
            return RouteViolation{i, route.nodes[i], route.nodes[i + 1]};
        }
    }
    return std::nullopt;
}

PowerTrace slice_trace(const PowerTrace& trace, double t_start, double t_end) {
    if (!(t_start >= 0.0) || !(t_end > t_start)) {
        throw std::invalid_argument("slice_trace: empty or inverted interval");
    }
    constexpr double kEps = 1e-9;
    if (t_end > trace.duration() + kEps * trace.sample_period) {
        throw std::invalid_argument("slice_trace: interval ends after the trace");
    }
    const auto n = trace.samples.size();
    auto begin = static_cast<std::size_t>(std::floor(t_start / trace.sample_period + kEps));
    auto end = static_cast<std::size_t>(std::ceil(t_end / trace.sample_period - kEps));
    end = std::min(end, n);
    if (begin >= end) {
        throw std::invalid_argument("slice_trace: interval contains no sample");
    }
    PowerTrace out;
    out.sample_period = trace.sample_period;
    out.meta = trace.meta;
    out.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                       trace.samples.begin() + static_cast<std::ptrdiff_t>(end));
    if (trace.ground_truth) {
        out.ground_truth.emplace(trace.ground_truth->begin() + static_cast<std::ptrdiff_t>(begin),
                                 trace.ground_truth->begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace powerloc
