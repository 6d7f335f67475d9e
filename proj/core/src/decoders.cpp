#include "powerloc/decoders.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace powerloc {

namespace {

bool has_prefix(const Route& route, const Route& prefix) {
    return route.size() >= prefix.size() &&
           std::equal(prefix.nodes.begin(), prefix.nodes.end(), route.nodes.begin());
}

Route extend(const Route& prefix, IntersectionId j) {
    Route out = prefix;
    out.nodes.push_back(j);
    return out;
}

}  // namespace

Route most_frequent_route(std::span<const Route> routes) {
    if (routes.empty()) {
        throw std::invalid_argument("most_frequent_route: empty input");
    }
    std::map<Route, std::size_t> counts;
    for (const auto& r : routes) {
        ++counts[r];
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) {
            best = it;
        }
    }
    return best->first;
}

MajorityVote iterative_majority_vote_ranking(std::span<const Route> routes, const RoadGraph& graph) {
    if (routes.empty()) {
        throw std::invalid_argument("iterative_majority_vote: empty input");
    }
    std::set<IntersectionId> universe;
    for (const auto& [id, pos] : graph.intersections()) {
        universe.insert(id);
    }
    for (const auto& r : routes) {
        universe.insert(r.nodes.begin(), r.nodes.end());
    }

    MajorityVote vote;
    std::vector<Route> level{Route{}};
    while (true) {
        PrefixRanking next;
        for (const auto& prefix : level) {
            // Routes under this prefix and how many continue with each j.
            std::map<IntersectionId, std::size_t> counts;
            for (const auto& r : routes) {
                if (r.size() > prefix.size() && has_prefix(r, prefix)) {
                    ++counts[r.nodes[prefix.size()]];
                }
            }
            std::set<IntersectionId> candidates = universe;
            while (true) {
                IntersectionId best = kNoIntersection;
                std::size_t best_count = 0;
                for (IntersectionId j : candidates) {
                    const auto it = counts.find(j);
                    const std::size_t c = it == counts.end() ? 0 : it->second;
                    if (c > best_count) {
                        best = j;
                        best_count = c;
                    }
                }
                if (best_count == 0) {
                    break;  // all extensions of this prefix found
                }
                next.push_back(extend(prefix, best));
                candidates.erase(best);
            }
        }
        if (next.empty()) {
            break;
        }
        vote.ranking.push_back(next);
        level = std::move(next);
    }

    std::size_t depth = 0;
    Route current = vote.ranking[0][0];
    while (depth + 1 < vote.ranking.size()) {
        const Route& candidate = vote.ranking[depth + 1][0];
        if (!has_prefix(candidate, current)) {
            break;
        }
        std::size_t ending = 0;
        std::size_t continuing = 0;
        for (const auto& r : routes) {
            ending += r == current ? 1 : 0;
            continuing += has_prefix(r, candidate) ? 1 : 0;
        }
        if (ending > continuing) {
            break;
        }
        current = candidate;
        ++depth;
    }
    vote.route = std::move(current);
    return vote;
}

Route iterative_majority_vote(std::span<const Route> routes, const RoadGraph& graph) {
    return iterative_majority_vote_ranking(routes, graph).route;
}

RouteEstimates estimate_pair(std::span<const Route> routes, const RoadGraph& graph) {
    return {most_frequent_route(routes), iterative_majority_vote(routes, graph)};
}

RouteEstimates estimate_pair(std::span<const RouteHypothesis> particles, const RoadGraph& graph) {
    const auto routes = routes_of(particles);
    return estimate_pair(routes, graph);
}

}  // namespace powerloc
