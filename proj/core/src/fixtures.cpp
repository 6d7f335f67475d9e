#include "powerloc/fixtures.hpp"

#include "powerloc/geo.hpp"
#include "powerloc/rng.hpp"

#include <algorithm>
#include <cmath>

namespace powerloc::fixtures {

namespace {

constexpr double kStationSpacingM = 600.0;
constexpr double kStationReferenceDbm = -55.0;

}  // namespace

LatLon default_origin() { return {47.3769, 8.5417}; }

RoadGraph graph_from_local(const std::map<IntersectionId, Vec2>& nodes,
                           const std::vector<SegmentKey>& two_way,
                           const std::vector<SegmentKey>& one_way, LatLon origin) {
    const LocalFrame frame(origin);
    RoadGraph g;
    for (const auto& [id, p] : nodes) {
        g.add_intersection(id, frame.to_geo(p));
    }
    for (const auto& [a, b] : two_way) {
        g.add_segment(Segment{a, b, 0.0, {}});
        g.add_segment(Segment{b, a, 0.0, {}});
    }
    for (const auto& [a, b] : one_way) {
        g.add_segment(Segment{a, b, 0.0, {}});
    }
    g.validate();
    return g;
}

RoadGraph grid13() {
    const std::map<IntersectionId, Vec2> nodes{
        {1, {0, 400}},     {2, {400, 400}},    {3, {800, 400}},   {4, {800, 0}},
        {5, {400, -400}},  {6, {400, 0}},      {7, {0, 0}},       {8, {0, -400}},
        {9, {1200, 0}},    {10, {1200, -400}}, {11, {1600, 0}},   {12, {1600, -400}},
        {13, {1200, 400}},
    };
    const std::vector<SegmentKey> two_way{
        {1, 2}, {2, 3}, {3, 4}, {4, 5},  {5, 6},   {6, 7},   {7, 1},   {5, 8},
        {8, 7}, {2, 4}, {4, 9}, {9, 10}, {11, 9},  {13, 3},  {13, 9},  {13, 11},
    };
    const std::vector<SegmentKey> one_way{{6, 4}, {10, 12}, {12, 11}};
    return graph_from_local(nodes, two_way, one_way);
}

std::vector<Route> grid13_test_routes() {
    return {
        Route::parse("8-5-6-7-1-2-3-4-5-6-4-3-2-1-7-8"),
        Route::parse("7-1-2-3-4-5-8-7-6-5-4-2-1-7-8"),
        Route::parse("3-2-4-9-10-12-11-9-4-5-6-4-3-2-1-7-6-5-8-7"),
        Route::parse("10-12-11-9-4-2-1-7-6-5-8"),
    };
}

std::vector<Route> sub_tracks(const std::vector<Route>& routes, std::size_t min_segments,
                              std::size_t max_segments) {
    std::vector<Route> out;
    for (const auto& route : routes) {
        for (std::size_t len = min_segments; len <= max_segments; ++len) {
            for (std::size_t begin = 0; begin + len < route.size(); ++begin) {
                Route piece;
                piece.nodes.assign(route.nodes.begin() + static_cast<std::ptrdiff_t>(begin),
                                   route.nodes.begin() + static_cast<std::ptrdiff_t>(begin + len + 1));
                out.push_back(std::move(piece));
            }
        }
    }
    return out;
}

std::map<std::string, Route> routes8() {
    const std::map<std::string, std::string> forward{
        {"A", "8-7-1-2-3-4"}, {"B", "8-5-6-7-1-2"}, {"C", "3-13-9-4-5-8"}, {"D", "2-4-9-11-13-3"}};
    std::map<std::string, Route> out;
    for (const auto& [label, text] : forward) {
        Route r = Route::parse(text);
        out[label] = r;
        std::reverse(r.nodes.begin(), r.nodes.end());
        out[label + "r"] = r;
    }
    return out;
}

RoadGraph tiny4() {
    const double h = 400.0 * std::sqrt(3.0) / 2.0;
    const std::map<IntersectionId, Vec2> nodes{
        {1, {200, -h}}, {2, {0, 0}}, {3, {200, h}}, {4, {400, 0}}};
    return graph_from_local(nodes, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {2, 4}}, {});
}

RoadGraph single_path(std::size_t intersections) {
    std::map<IntersectionId, Vec2> nodes;
    std::vector<SegmentKey> one_way;
    for (std::size_t i = 1; i <= intersections; ++i) {
        nodes[static_cast<IntersectionId>(i)] = {400.0 * static_cast<double>(i - 1), 0.0};
        if (i > 1) {
            one_way.emplace_back(static_cast<IntersectionId>(i - 1), static_cast<IntersectionId>(i));
        }
    }
    return graph_from_local(nodes, {}, one_way);
}

Route corridor_route() { return grid13_test_routes()[2]; }

WorldConfig default_world_config(const RoadGraph& graph, std::uint64_t seed) {
    WorldConfig cfg;
    cfg.seed = seed;
    cfg.base_stations =
        place_base_stations(graph, kStationSpacingM, kStationReferenceDbm, derive_seed(seed, 0xb5));
    return cfg;
}

World make_world(const RoadGraph& graph, std::uint64_t seed) {
    return World(default_world_config(graph, seed), graph);
}

}  // namespace powerloc::fixtures
