#pragma once

#include "powerloc/hmm.hpp"
#include "powerloc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace powerloc {

struct RouteHypothesis {
    TimedRoute timed_route;
    double weight = 0.0;  // cost of the most recent segment
    double end_time = 0.0;
    bool exhausted = false;

    friend bool operator==(const RouteHypothesis&, const RouteHypothesis&) = default;
};

/// Segment weights keyed by (t_end grid index, triple). Every particle that
/// reaches the same boundary and samples the same triple gets the same
/// weight, so this is only a cache.
class WeightCache {
  public:
    using Key = std::pair<long long, Triple>;
    [[nodiscard]] const std::optional<SegmentWeight>* find(const Key& key) const;
    void insert(const Key& key, std::optional<SegmentWeight> value);
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

  private:
    std::map<Key, std::optional<SegmentWeight>> entries_;
};

struct PfStep {
    std::vector<RouteHypothesis> particles;
    bool completed = false;  // nothing could be extended
};

/// One extend/weight/resample round. Particle i draws its continuation from
/// its own stream derive_seed(seed, iteration, i); only the particles
/// extended in this round take part in resampling, the others keep their
/// slots.
[[nodiscard]] PfStep pf_iterate(std::vector<RouteHypothesis> particles,
                                const PreparedObservation& observation, const HmmModel& model,
                                std::uint64_t seed, std::size_t iteration, unsigned jobs = 1,
                                WeightCache* cache = nullptr);

/// Resampling probabilities exp(-(w - min w) / T), normalized.
[[nodiscard]] std::vector<double> resampling_probabilities(std::span<const double> costs,
                                                           const InferenceConfig& cfg);

/// Systematic resampling: `count` indices drawn with one uniform offset.
[[nodiscard]] std::vector<std::size_t> systematic_resample(std::span<const double> probabilities,
                                                           std::size_t count, double offset);

[[nodiscard]] std::size_t default_max_iterations(const PreparedObservation& observation,
                                                 const HmmModel& model);

/// Runs until no particle can be extended or the iteration bound is hit.
[[nodiscard]] std::vector<RouteHypothesis> run_particle_filter(
    const PreparedObservation& observation, const HmmModel& model, std::size_t n,
    std::optional<std::size_t> max_iterations, std::uint64_t seed, unsigned jobs = 1);

[[nodiscard]] std::vector<Route> routes_of(std::span<const RouteHypothesis> particles);

/// Route -> multiplicity.
[[nodiscard]] std::map<Route, std::size_t> route_histogram(std::span<const Route> routes);

}  // namespace powerloc
