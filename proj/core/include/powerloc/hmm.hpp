#pragma once

#include "powerloc/preprocess.hpp"
#include "powerloc/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace powerloc {

struct InferenceConfig {
    /// Smoothing and downsampling run over the whole observation and every
    /// recording; truncation, z-normalization and the percentile threshold
    /// run per recording and per observation slice.
    PreprocessConfig preprocess;
    double tau_s = 3.0;
    double delta_margin = 0.2;  // widens observed traversal-time bounds by +/- this fraction
    /// Resampling probabilities are exp(-W / T). Without a fixed temperature,
    /// T = temperature_scale * median(W) over the particles just extended.
    double temperature_scale = 0.25;
    std::optional<double> fixed_temperature;
    std::size_t particles = 500;
    std::optional<std::size_t> max_iterations;

    void validate() const;
};

/// Triples the library would need but does not contain.
class CoverageError : public std::runtime_error {
  public:
    explicit CoverageError(std::vector<Triple> missing);
    [[nodiscard]] const std::vector<Triple>& missing() const { return missing_; }

  private:
    std::vector<Triple> missing_;
};

/// Observation/model mismatch, e.g. no admissible first segment.
class InferenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DeltaBounds {
    double min_s = 0.0;
    double max_s = 0.0;
};

struct HmmModel {
    RoadGraph graph;
    IntersectionId start = 0;
    std::map<Triple, double> transitions;       // a_xyz; first steps use prev = kNoIntersection
    std::map<SegmentKey, double> initial;       // pi over segments leaving start
    std::map<SegmentKey, DeltaBounds> delta_bounds;
    std::set<SegmentKey> terminal;              // states with no continuation
    /// Preprocessed recordings per triple. A first step, which has no known
    /// entry direction, is scored against every recording of its segment.
    std::map<Triple, std::vector<std::vector<double>>> recordings;
    InferenceConfig config;

    /// (z, probability) in ascending z; empty for terminal states.
    [[nodiscard]] std::vector<std::pair<IntersectionId, double>> next_distribution(
        IntersectionId x, IntersectionId y) const;
    [[nodiscard]] std::vector<std::pair<IntersectionId, double>> first_distribution() const;
    [[nodiscard]] const std::vector<std::vector<double>>& recordings_for(const Triple& t) const;
    [[nodiscard]] double min_delta() const;
};

/// Continuations of (x, y): successors of y other than x. x may be
/// kNoIntersection.
[[nodiscard]] std::vector<IntersectionId> feasible_next(const RoadGraph& graph, IntersectionId x,
                                                        IntersectionId y);

/// Builds the model and checks coverage of every triple reachable from
/// `start` within `steps` transitions (unbounded when empty).
[[nodiscard]] HmmModel build_model(const RoadGraph& graph, const ReferenceLibrary& library,
                                   IntersectionId start, const InferenceConfig& cfg,
                                   std::optional<std::size_t> steps = std::nullopt,
                                   unsigned jobs = 1);

struct PreparedObservation {
    std::vector<double> series;  // smoothed and downsampled
    double sample_period = 1.0;  // of `series`
    double t_max = 0.0;          // raw duration
};

[[nodiscard]] PreparedObservation prepare_observation(const PowerTrace& observation,
                                                     const InferenceConfig& cfg);

/// Per-slice part of the pipeline (truncate, z-normalize, percentile).
void condition_slice(std::vector<double>& slice, const PreprocessConfig& cfg);

struct SegmentWeight {
    double cost = 0.0;
    double duration_s = 0.0;
};

/// Candidate durations from t_end: multiples of tau within the segment's
/// bounds, clipped at t_max. Empty when the remaining time is below the lower
/// bound.
[[nodiscard]] std::vector<double> candidate_durations(const HmmModel& model, SegmentKey segment,
                                                      double t_end, double t_max);

/// Minimum normalized DTW over candidate durations and recordings; the
/// shortest duration wins ties. Empty when no duration is admissible.
[[nodiscard]] std::optional<SegmentWeight> segment_likelihood_weight(
    const PreparedObservation& observation, double t_end, const Triple& triple,
    const HmmModel& model);

}  // namespace powerloc
