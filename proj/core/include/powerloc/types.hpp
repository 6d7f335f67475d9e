#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace powerloc {

/// Intersections are small non-negative integers, as in "8-5-6-7".
using IntersectionId = int;

/// Marks an unknown (or absent) previous intersection in a segment triple.
inline constexpr IntersectionId kNoIntersection = -1;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Input failed a documented invariant (bad file, bad graph, bad route).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A required input file or directory does not exist.
class MissingFileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Uniformly sampled power series (milliwatts) with optional per-sample
/// positions. Preprocessed traces reuse this type, so non-negativity is only
/// enforced by validate(true) on raw recordings.
struct PowerTrace {
    double sample_period = 1.0;
    std::vector<double> samples;
    std::optional<std::vector<LatLon>> ground_truth;
    std::map<std::string, std::string> meta;

    [[nodiscard]] std::size_t size() const { return samples.size(); }
    [[nodiscard]] bool empty() const { return samples.empty(); }
    [[nodiscard]] double duration() const {
        return static_cast<double>(samples.size()) * sample_period;
    }
    [[nodiscard]] bool has_ground_truth() const { return ground_truth.has_value(); }

    /// Throws FormatError on the first broken invariant.
    void validate(bool require_nonnegative = true) const;

    friend bool operator==(const PowerTrace&, const PowerTrace&) = default;
};

struct Segment {
    IntersectionId from = 0;
    IntersectionId to = 0;
    double length_m = 0.0;
    std::vector<LatLon> polyline;  // includes both endpoints

    friend bool operator==(const Segment&, const Segment&) = default;
};

using SegmentKey = std::pair<IntersectionId, IntersectionId>;

/// Directed road graph. One-way streets are segments present in one
/// direction only.
class RoadGraph {
  public:
    void add_intersection(IntersectionId id, LatLon position);
    /// Adds a segment; a missing polyline becomes the straight endpoint line
    /// and a non-positive length becomes the polyline length.
    void add_segment(Segment segment);

    [[nodiscard]] bool has_intersection(IntersectionId id) const;
    [[nodiscard]] bool has_segment(IntersectionId from, IntersectionId to) const;
    [[nodiscard]] const Segment& segment(IntersectionId from, IntersectionId to) const;
    [[nodiscard]] LatLon position(IntersectionId id) const;

    /// Sorted ids w with (id, w) a segment.
    [[nodiscard]] std::vector<IntersectionId> successors(IntersectionId id) const;
    /// Sorted ids w with (w, id) a segment.
    [[nodiscard]] std::vector<IntersectionId> predecessors(IntersectionId id) const;

    [[nodiscard]] const std::map<IntersectionId, LatLon>& intersections() const {
        return intersections_;
    }
    [[nodiscard]] const std::map<SegmentKey, Segment>& segments() const { return segments_; }

    void validate() const;

    friend bool operator==(const RoadGraph&, const RoadGraph&) = default;

  private:
    std::map<IntersectionId, LatLon> intersections_;
    std::map<SegmentKey, Segment> segments_;
};

struct Route {
    std::vector<IntersectionId> nodes;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
    [[nodiscard]] bool empty() const { return nodes.empty(); }
    [[nodiscard]] std::size_t segment_count() const {
        return nodes.size() < 2 ? 0 : nodes.size() - 1;
    }
    /// "8-5-6-7".
    [[nodiscard]] std::string to_string() const;
    static Route parse(const std::string& text);

    friend auto operator<=>(const Route&, const Route&) = default;
    friend bool operator==(const Route&, const Route&) = default;
};

/// Route plus one boundary time per traversed segment; t0 = 0 is implied.
struct TimedRoute {
    Route route;
    std::vector<double> boundary_times;

    void validate() const;

    friend bool operator==(const TimedRoute&, const TimedRoute&) = default;
};

/// Segment (from, to) recorded after arriving over (prev, from). prev may be
/// kNoIntersection for a recording that started at `from`.
struct Triple {
    IntersectionId prev = kNoIntersection;
    IntersectionId from = 0;
    IntersectionId to = 0;

    [[nodiscard]] std::string to_string() const;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

struct ReferenceLibrary {
    std::map<std::string, std::vector<PowerTrace>> routes;
    std::map<Triple, std::vector<PowerTrace>> segments;

    /// Checks non-empty lists and, when a graph is given, that every triple
    /// names graph segments.
    void validate(const RoadGraph* graph = nullptr) const;

    friend bool operator==(const ReferenceLibrary&, const ReferenceLibrary&) = default;
};

struct RouteViolation {
    std::size_t index = 0;  // position of `from` in the route
    IntersectionId from = 0;
    IntersectionId to = 0;
};

/// Empty optional when every consecutive pair is a directed segment.
[[nodiscard]] std::optional<RouteViolation> validate_route(const RoadGraph& graph,
                                                           const Route& route);

/// Sub-trace over [t_start, t_end): the sample at t_start is included, the one
/// at t_end is not; bounds are rounded outward to sample boundaries.
[[nodiscard]] PowerTrace slice_trace(const PowerTrace& trace, double t_start, double t_end);

}  // namespace powerloc
