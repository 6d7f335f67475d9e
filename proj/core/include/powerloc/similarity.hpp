#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace powerloc {

struct IndexPair {
    std::size_t query = 0;
    std::size_t target = 0;

    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Result of aligning a query against a target.
///
/// For DTW variants `path` is the full warping path. For OSB it holds only the
/// matched pairs and every unmatched element sits in one of the skipped sets
/// (for subsequence OSB, target elements outside [start_offset, end_offset]
/// are free and not listed).
struct Alignment {
    double distance = 0.0;
    std::vector<IndexPair> path;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;
    std::vector<std::size_t> skipped_query;
    std::vector<std::size_t> skipped_target;
    double jump_cost = 0.0;

    /// Number of alignment steps: path pairs plus charged skips.
    [[nodiscard]] std::size_t steps() const {
        return path.size() + skipped_query.size() + skipped_target.size();
    }
    [[nodiscard]] double normalized_distance() const {
        return steps() == 0 ? 0.0 : distance / static_cast<double>(steps());
    }
};

/// Distance-only view of an alignment, computed in O(m) memory.
struct MatchSummary {
    double distance = 0.0;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;
    std::size_t steps = 0;

    [[nodiscard]] double normalized_distance() const {
        return steps == 0 ? 0.0 : distance / static_cast<double>(steps);
    }
};

// Local cost is |a_i - b_j| everywhere. Among equal-cost solutions the
// smallest start offset wins, then the smallest end offset, then the longest
// path (so normalized distances are as small as the optimum allows).

/// Classic DTW with steps (1,0), (0,1), (1,1); no band, no slope limit.
[[nodiscard]] Alignment dtw_distance(std::span<const double> a, std::span<const double> b);
[[nodiscard]] MatchSummary dtw_summary(std::span<const double> a, std::span<const double> b);

/// DTW cost divided by the warping-path length.
[[nodiscard]] double normalized_dtw(std::span<const double> a, std::span<const double> b);

/// Best alignment of the whole query against any contiguous target window.
[[nodiscard]] Alignment subsequence_dtw(std::span<const double> query,
                                        std::span<const double> target);
[[nodiscard]] MatchSummary subsequence_dtw_summary(std::span<const double> query,
                                                   std::span<const double> target);

enum class OsbMode {
    full,         // every unmatched element of either sequence costs jump_cost
    subsequence,  // target elements before the first / after the last match are free
};

/// Optimal Subsequence Bijection: minimum over non-empty monotone one-to-one
/// matchings of the matched costs plus jump_cost per skipped element.
[[nodiscard]] Alignment osb(std::span<const double> query, std::span<const double> target,
                            double jump_cost, OsbMode mode = OsbMode::full);
[[nodiscard]] MatchSummary osb_summary(std::span<const double> query,
                                       std::span<const double> target, double jump_cost,
                                       OsbMode mode = OsbMode::full);

/// mean + population std of all pairwise |a_i - b_j|.
[[nodiscard]] double default_jump_cost(std::span<const double> a, std::span<const double> b);

/// Sum of local costs along the path plus jump_cost per listed skip.
[[nodiscard]] double replay_cost(const Alignment& alignment, std::span<const double> query,
                                 std::span<const double> target);

}  // namespace powerloc
