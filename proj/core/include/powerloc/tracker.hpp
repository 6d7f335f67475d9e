#pragma once

#include "powerloc/preprocess.hpp"
#include "powerloc/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powerloc {

enum class Matcher { dtw, osb };

struct TrackerConfig {
    /// Applied to every reference once and to the accumulated stream at
    /// every tick. Default: smoothing and downsampling only.
    PreprocessConfig preprocess{.znormalize = false, .percentile = std::nullopt};
    Matcher matcher = Matcher::dtw;
    std::optional<double> osb_jump_cost;  // default: per-pair mean + std heuristic
    double update_interval_s = 3.0;
    double max_speed_mps = 35.0;
    std::optional<double> max_disp_m;     // default: 1.5 * update_interval_s * max_speed_mps
    double threshold = 0.6;               // on score = 1 / (1 + normalized distance)
    double error_bound_fraction = 0.05;   // of route length
    std::size_t convergence_dwell = 10;   // ticks

    [[nodiscard]] double effective_max_disp() const;
    void validate() const;
};

struct PreparedReference {
    std::string label;
    std::vector<double> series;
    std::vector<LatLon> positions;  // aligned with series
};

/// Preprocesses every route reference; references must carry coordinates.
[[nodiscard]] std::vector<PreparedReference> prepare_tracking_references(
    const ReferenceLibrary& library, const TrackerConfig& cfg, unsigned jobs = 1);

struct TrackingEstimate {
    double t_s = 0.0;
    std::string route_label;
    std::size_t reference = 0;   // index into the prepared references
    std::size_t end_offset = 0;  // index into that reference's series
    LatLon position;
    double distance = 0.0;       // normalized matcher distance
    double score = 0.0;
    bool corrected = false;
};

/// Matches the accumulated (raw) samples against every reference and returns
/// the location at the best reference's end offset.
[[nodiscard]] TrackingEstimate estimate_location(const PowerTrace& accumulated,
                                                 std::span<const PreparedReference> refs,
                                                 const TrackerConfig& cfg, unsigned jobs = 1);

[[nodiscard]] double similarity_score(double normalized_distance);

struct TrackerState {
    bool locked = false;
    std::optional<TrackingEstimate> last_estimate;
    double threshold = 0.6;
    double max_disp_m = 157.5;
    std::vector<TrackingEstimate> history;

    [[nodiscard]] static TrackerState initial(const TrackerConfig& cfg);
};

/// One pass of the lock/displacement rule: while locked, an estimate that
/// jumps more than max_disp from the previous output is replaced by the
/// previous output. The lock flag is updated afterwards from the raw score.
[[nodiscard]] TrackingEstimate apply_motion_model(TrackerState& state, TrackingEstimate raw);

[[nodiscard]] std::pair<TrackerState, TrackingEstimate> step_with_motion_model(
    TrackerState state, const PowerTrace& accumulated, std::span<const PreparedReference> refs,
    const TrackerConfig& cfg, unsigned jobs = 1);

struct TrackingVariant {
    bool motion_model = false;
    Matcher matcher = Matcher::dtw;
};

struct TrackingRun {
    std::vector<TrackingEstimate> estimates;
    std::vector<double> errors_m;                // empty without ground truth
    double route_length_m = 0.0;                 // from the stream's ground truth
    double error_bound_m = 0.0;
    std::optional<std::size_t> convergence_tick;
    double fraction_below_bound = 0.0;           // over ticks from convergence on
};

/// Raw estimates, one per update interval of new samples.
[[nodiscard]] std::vector<TrackingEstimate> track_raw(const PowerTrace& stream,
                                                      std::span<const PreparedReference> refs,
                                                      const TrackerConfig& cfg, unsigned jobs = 1);

/// Runs apply_motion_model over a raw estimate series.
[[nodiscard]] std::vector<TrackingEstimate> apply_motion_model_series(
    std::span<const TrackingEstimate> raw, const TrackerConfig& cfg);

/// Per-tick errors and convergence statistics against the stream's ground truth.
[[nodiscard]] TrackingRun score_tracking(const PowerTrace& stream,
                                         std::vector<TrackingEstimate> estimates,
                                         const TrackerConfig& cfg);

[[nodiscard]] TrackingRun run_tracking(const PowerTrace& stream, const ReferenceLibrary& library,
                                       TrackerConfig cfg, TrackingVariant variant,
                                       unsigned jobs = 1);

/// First tick from which the next `dwell` errors (or all remaining ones) stay
/// below `bound`.
[[nodiscard]] std::optional<std::size_t> convergence_tick(std::span<const double> errors,
                                                          double bound, std::size_t dwell);

/// Sample index of the last raw sample seen at tick k (0-based).
[[nodiscard]] std::size_t tick_sample_count(const PowerTrace& stream, double interval_s,
                                            std::size_t tick);

}  // namespace powerloc
