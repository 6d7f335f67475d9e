#pragma once

#include "powerloc/synthworld.hpp"
#include "powerloc/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Desk-scale scenarios shared by the CLI, tests and benchmarks.
namespace powerloc::fixtures {

[[nodiscard]] LatLon default_origin();

/// Builds a graph from local coordinates (meters east/north of the origin)
/// and undirected / one-way edge lists with straight polylines.
[[nodiscard]] RoadGraph graph_from_local(const std::map<IntersectionId, Vec2>& nodes,
                                         const std::vector<SegmentKey>& two_way,
                                         const std::vector<SegmentKey>& one_way,
                                         LatLon origin = default_origin());

/// 13 intersections, 35 directed segments on a 400 m lattice, with three
/// one-way segments (6->4, 10->12, 12->11).
[[nodiscard]] RoadGraph grid13();

/// Four long drives over grid13.
[[nodiscard]] std::vector<Route> grid13_test_routes();

/// Every contiguous piece of each route with min..max segments.
[[nodiscard]] std::vector<Route> sub_tracks(const std::vector<Route>& routes,
                                            std::size_t min_segments, std::size_t max_segments);

/// Eight five-segment routes over grid13 (four routes and their reverses).
[[nodiscard]] std::map<std::string, Route> routes8();

/// Rhombus 1-2-3-4 with the short diagonal 2-4; every segment is 400 m.
[[nodiscard]] RoadGraph tiny4();
inline constexpr IntersectionId kTiny4Start = 1;

/// One-way chain 1 -> 2 -> ... -> n, 400 m per segment.
[[nodiscard]] RoadGraph single_path(std::size_t intersections = 4);

/// The long route used for tracking (the third grid13 test route).
[[nodiscard]] Route corridor_route();

/// Default world over `graph`: stations on a jittered lattice plus the
/// defaults of WorldConfig.
[[nodiscard]] WorldConfig default_world_config(const RoadGraph& graph, std::uint64_t seed);
[[nodiscard]] World make_world(const RoadGraph& graph, std::uint64_t seed);

}  // namespace powerloc::fixtures
