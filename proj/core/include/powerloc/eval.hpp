#pragma once

#include "powerloc/decoders.hpp"
#include "powerloc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace powerloc {

struct EditDistance {
    std::size_t raw = 0;
    double normalized = 0.0;  // raw / max(|a|, |b|)
};

/// Unit-cost insert/delete/substitute distance over intersection sequences.
[[nodiscard]] EditDistance levenshtein_routes(const Route& a, const Route& b);

/// Whether both routes end on the same segment.
[[nodiscard]] bool destination_hit(const Route& estimate, const Route& truth);

[[nodiscard]] bool exact_fit(const Route& estimate, const Route& truth);

struct DecoderScores {
    double destination_rate = 0.0;
    double mean_normalized_distance = 0.0;
    double exact_fit_rate = 0.0;
};

/// A random feasible route of `segments` segments from `start`, drawn with
/// the same rule as the inference model (uniform over successors, no
/// immediate backtrack). Stops early at a dead end.
[[nodiscard]] Route random_feasible_route(const RoadGraph& graph, IntersectionId start,
                                          std::size_t segments, std::uint64_t seed);

/// Monte Carlo over `trials` random routes from (start, length), each scored
/// against every truth.
[[nodiscard]] DecoderScores random_route_baseline(const RoadGraph& graph, IntersectionId start,
                                                  std::size_t length,
                                                  std::span<const Route> truths,
                                                  std::size_t trials, std::uint64_t seed);

/// Baseline for a set of ground-truth tracks: each truth is compared with
/// `trials` random routes sharing its start and segment count.
[[nodiscard]] DecoderScores random_route_baseline(const RoadGraph& graph,
                                                  std::span<const Route> truths,
                                                  std::size_t trials, std::uint64_t seed);

struct MetricRow {
    std::string name;
    double value = 0.0;
    std::optional<double> baseline;
    std::size_t n = 0;
};

struct EvalReport {
    std::string scenario;
    std::vector<MetricRow> rows;
    /// Plot data, e.g. "error_vs_time" -> (t, error) and "error_cdf" -> (error, F).
    std::map<std::string, std::vector<std::pair<double, double>>> series;

    [[nodiscard]] const MetricRow* find(const std::string& name) const;
};

/// Per-tick haversine errors, empirical CDF, fraction below `bound_m` and the
/// convergence tick (first tick from which `dwell` ticks stay below bound).
[[nodiscard]] EvalReport tracking_error_report(std::span<const LatLon> estimates,
                                               std::span<const LatLon> truth,
                                               std::span<const double> times_s, double bound_m,
                                               std::size_t dwell, std::string scenario = "tracking");

struct RouteInferenceSummary {
    DecoderScores random;
    DecoderScores frequent;
    DecoderScores imv;
    DecoderScores combined;  // per track, the better of the two decoders
    std::size_t n = 0;
};

[[nodiscard]] RouteInferenceSummary summarize_route_inference(
    std::span<const RouteEstimates> estimates, std::span<const Route> truths,
    const DecoderScores& random_baseline);

[[nodiscard]] EvalReport route_inference_report(std::span<const RouteEstimates> estimates,
                                                std::span<const Route> truths,
                                                const DecoderScores& random_baseline,
                                                std::string scenario = "route_inference");

/// metric,random,frequent,imv,combined
[[nodiscard]] std::string route_inference_table_csv(const RouteInferenceSummary& summary);

/// scenario,metric,value,baseline,n
[[nodiscard]] std::string report_csv(const EvalReport& report, bool header = true);
[[nodiscard]] std::string report_json(const EvalReport& report);
[[nodiscard]] EvalReport report_from_json(const std::string& text);

}  // namespace powerloc
