#include "powerloc/particle_filter.hpp"

#include "powerloc/parallel.hpp"
#include "powerloc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace powerloc {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr std::uint64_t kResampleStream = 0xffff'ffff'ffff'ffffULL;

IntersectionId draw(const std::vector<std::pair<IntersectionId, double>>& dist, Rng& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (const auto& [z, p] : dist) {
        acc += p;
        if (u < acc) {
            return z;
        }
    }
    return dist.back().first;
}

double median(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double hi = values[mid];
    if (values.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

const std::optional<SegmentWeight>* WeightCache::find(const Key& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void WeightCache::insert(const Key& key, std::optional<SegmentWeight> value) {
    entries_.emplace(key, value);
}

std::vector<double> resampling_probabilities(std::span<const double> costs,
                                             const InferenceConfig& cfg) {
    if (costs.empty()) {
        return {};
    }
    const double lo = *std::min_element(costs.begin(), costs.end());
    double temperature = 0.0;
    if (cfg.fixed_temperature) {
        temperature = *cfg.fixed_temperature;
    } else {
        temperature = cfg.temperature_scale * median({costs.begin(), costs.end()});
        if (!(temperature > 0.0)) {
            // More than half the costs are zero: fall back to the mean.
            double sum = 0.0;
            for (double c : costs) {
                sum += c;
            }
            temperature = cfg.temperature_scale * sum / static_cast<double>(costs.size());
        }
    }
    std::vector<double> probs(costs.size());
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(costs.size()));
        return probs;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        probs[i] = std::exp(-(costs[i] - lo) / temperature);
        total += probs[i];
    }
    for (double& p : probs) {
        p /= total;
    }
    return probs;
}

std::vector<std::size_t> systematic_resample(std::span<const double> probabilities,
                                             std::size_t count, double offset) {
    std::vector<std::size_t> out;
    out.reserve(count);
    if (probabilities.empty()) {
        return out;
    }
    std::size_t j = 0;
    double acc = probabilities[0];
    for (std::size_t k = 0; k < count; ++k) {
        const double u = (offset + static_cast<double>(k)) / static_cast<double>(count);
        while (u >= acc && j + 1 < probabilities.size()) {
            ++j;
            acc += probabilities[j];
        }
        out.push_back(j);
    }
    return out;
}

PfStep pf_iterate(std::vector<RouteHypothesis> particles, const PreparedObservation& observation,
                  const HmmModel& model, std::uint64_t seed, std::size_t iteration, unsigned jobs,
                  WeightCache* cache) {
    if (particles.empty()) {
        throw std::invalid_argument("pf_iterate: no particles");
    }
    const double tau = model.config.tau_s;
    const std::size_t n = particles.size();

    // Extension: every live particle samples its next intersection.
    std::vector<std::optional<WeightCache::Key>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = particles[i];
        if (p.exhausted) {
            continue;
        }
        const auto& nodes = p.timed_route.route.nodes;
        const IntersectionId prev = nodes.size() >= 2 ? nodes[nodes.size() - 2] : kNoIntersection;
        const IntersectionId y = nodes.back();
        const auto dist = nodes.size() >= 2 ? model.next_distribution(prev, y)
                                            : model.first_distribution();
        if (dist.empty()) {
            p.exhausted = true;  // dead end
            continue;
        }
        Rng rng(derive_seed(seed, iteration, i));
        const IntersectionId z = draw(dist, rng);
        keys[i] = WeightCache::Key{std::llround(p.end_time / tau), Triple{prev, y, z}};
    }

    // Weighting: each distinct (boundary, triple) is scored once.
    WeightCache local;
    WeightCache& store = cache ? *cache : local;
    std::vector<WeightCache::Key> todo;
    for (const auto& key : keys) {
        if (key && !store.find(*key)) {
            todo.push_back(*key);
        }
    }
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    std::vector<std::optional<SegmentWeight>> computed(todo.size());
    parallel_for(todo.size(), jobs, [&](std::size_t k) {
        const double t_end = static_cast<double>(todo[k].first) * tau;
        computed[k] = segment_likelihood_weight(observation, t_end, todo[k].second, model);
    });
    for (std::size_t k = 0; k < todo.size(); ++k) {
        store.insert(todo[k], computed[k]);
    }

    std::vector<std::size_t> extended;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keys[i]) {
            continue;
        }
        auto& p = particles[i];
        const auto& w = *store.find(*keys[i]);
        if (!w) {
            p.exhausted = true;
            continue;
        }
        const double t_end = static_cast<double>(keys[i]->first) * tau;
        double end = t_end + w->duration_s;
        if (end >= observation.t_max - kTimeEps) {
            end = observation.t_max;
            p.exhausted = true;
        }
        p.timed_route.route.nodes.push_back(keys[i]->second.to);
        p.timed_route.boundary_times.push_back(end);
        p.end_time = end;
        p.weight = w->cost;
        extended.push_back(i);
    }
    if (extended.empty()) {
        return {std::move(particles), true};
    }

    // Resampling among the particles extended in this round.
    std::vector<double> costs;
    costs.reserve(extended.size());
    for (std::size_t i : extended) {
        costs.push_back(particles[i].weight);
    }
    const auto probs = resampling_probabilities(costs, model.config);
    Rng rng(derive_seed(seed, iteration, kResampleStream));
    const auto picks = systematic_resample(probs, extended.size(), uniform01(rng));
    std::vector<RouteHypothesis> chosen;
    chosen.reserve(picks.size());
    for (std::size_t k : picks) {
        chosen.push_back(particles[extended[k]]);
    }
    for (std::size_t k = 0; k < extended.size(); ++k) {
        particles[extended[k]] = std::move(chosen[k]);
    }
    return {std::move(particles), false};
}

std::size_t default_max_iterations(const PreparedObservation& observation, const HmmModel& model) {
    const double lo = model.min_delta();
    if (!(lo > 0.0) || !std::isfinite(lo)) {
        return 1;
    }
    return static_cast<std::size_t>(std::ceil(observation.t_max / lo - kTimeEps));
}

std::vector<RouteHypothesis> run_particle_filter(const PreparedObservation& observation,
                                                 const HmmModel& model, std::size_t n,
                                                 std::optional<std::size_t> max_iterations,
                                                 std::uint64_t seed, unsigned jobs) {
    if (n < 1) {
        throw std::invalid_argument("run_particle_filter: N must be >= 1");
    }
    bool any_start = false;
    for (const auto& [key, p] : model.initial) {
        const auto it = model.delta_bounds.find(key);
        any_start = any_start || (it != model.delta_bounds.end() &&
                                  observation.t_max + kTimeEps >= it->second.min_s);
    }
    if (!any_start) {
        throw InferenceError("observation is shorter than every admissible first segment");
    }

    RouteHypothesis seed_particle;
    seed_particle.timed_route.route.nodes = {model.start};
    std::vector<RouteHypothesis> particles(n, seed_particle);
    const std::size_t limit = max_iterations.value_or(default_max_iterations(observation, model));
    WeightCache cache;
    for (std::size_t it = 0; it < limit; ++it) {
        auto step = pf_iterate(std::move(particles), observation, model, seed, it, jobs, &cache);
        particles = std::move(step.particles);
        if (step.completed) {
            break;
        }
    }
    return particles;
}

std::vector<Route> routes_of(std::span<const RouteHypothesis> particles) {
    std::vector<Route> out;
    out.reserve(particles.size());
    for (const auto& p : particles) {
        out.push_back(p.timed_route.route);
    }
    return out;
}

std::map<Route, std::size_t> route_histogram(std::span<const Route> routes) {
    std::map<Route, std::size_t> out;
    for (const auto& r : routes) {
        ++out[r];
    }
    return out;
}

}  // namespace powerloc
