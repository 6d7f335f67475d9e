#pragma once

#include "powerloc/particle_filter.hpp"
#include "powerloc/types.hpp"

#include <span>
#include <vector>

namespace powerloc {

/// Modal route; equal counts resolve to the lexicographically smaller route.
[[nodiscard]] Route most_frequent_route(std::span<const Route> routes);

/// Prefixes of one length, best first.
using PrefixRanking = std::vector<Route>;

struct MajorityVote {
    Route route;
    /// ranking[i] holds the ranked prefixes with i + 1 intersections.
    std::vector<PrefixRanking> ranking;
};

/// Ranks prefixes by prevalence, level by level. Under each ranked prefix
/// (best first) the extensions are taken one at a time: the intersection j
/// with the most routes starting with prefix + j is appended and removed from
/// the candidate set; when no candidate extends the prefix any further the
/// candidate set is reset and the next prefix is processed.
///
/// The answer follows the top-ranked prefix down the levels and stops where
/// more routes end exactly at the current prefix than continue with its best
/// extension.
[[nodiscard]] MajorityVote iterative_majority_vote_ranking(std::span<const Route> routes,
                                                           const RoadGraph& graph);
[[nodiscard]] Route iterative_majority_vote(std::span<const Route> routes, const RoadGraph& graph);

struct RouteEstimates {
    Route frequent;
    Route imv;
};

[[nodiscard]] RouteEstimates estimate_pair(std::span<const Route> routes, const RoadGraph& graph);
[[nodiscard]] RouteEstimates estimate_pair(std::span<const RouteHypothesis> particles,
                                           const RoadGraph& graph);

}  // namespace powerloc
