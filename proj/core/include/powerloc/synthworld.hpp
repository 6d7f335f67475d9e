#pragma once

#include "powerloc/geo.hpp"
#include "powerloc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace powerloc {

struct BaseStation {
    LatLon position;
    double reference_signal_dbm = -30.0;  // received at the reference distance

    friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

/// Maps received signal to radio draw: alpha * g(s), where g is 1 at or above
/// best_signal_dbm, worst_to_best_ratio at or below worst_signal_dbm and
/// affine in between.
struct PowerModel {
    double base_draw_mw = 500.0;
    double radio_coefficient_mw = 800.0;
    double best_signal_dbm = -60.0;
    double worst_signal_dbm = -95.0;
    double worst_to_best_ratio = 1.5;

    [[nodiscard]] double g(double signal_dbm) const;

    friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

/// Per-sample Gaussian noise plus Poisson phone-call-like pulses that add
/// U(min_amplitude, max_amplitude) * base_draw for U(min_s, max_s) seconds.
struct NoiseModel {
    double gaussian_sigma_mw = 60.0;
    double transient_rate_hz = 0.0;
    double transient_min_s = 20.0;
    double transient_max_s = 90.0;
    double transient_min_amplitude = 2.0;
    double transient_max_amplitude = 4.0;

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// How drive plans are drawn: one constant speed per segment and an optional
/// stop at the intersection a segment starts from.
struct DriveModel {
    double min_speed_mps = 8.0;
    double max_speed_mps = 14.0;
    double stop_probability = 0.25;
    double min_stop_s = 5.0;
    double max_stop_s = 30.0;
    double sample_period_s = 0.1;

    friend bool operator==(const DriveModel&, const DriveModel&) = default;
};

struct WorldConfig {
    std::uint64_t seed = 1;
    std::vector<BaseStation> base_stations;
    double path_loss_exponent = 2.0;
    double reference_distance_m = 10.0;
    double shadowing_sigma_db = 6.0;
    double shadow_grid_m = 50.0;
    double hysteresis_db = 4.0;
    PowerModel power;
    NoiseModel noise;
    DriveModel drive;

    void validate() const;

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

class World {
  public:
    World(WorldConfig config, RoadGraph graph);

    [[nodiscard]] const WorldConfig& config() const { return config_; }
    [[nodiscard]] const RoadGraph& graph() const { return graph_; }
    [[nodiscard]] const LocalFrame& frame() const { return frame_; }
    [[nodiscard]] std::size_t station_count() const { return stations_.size(); }

    /// Frozen shadowing for station `bs` at a local position (dB).
    [[nodiscard]] double shadow_db(Vec2 p, std::size_t bs) const;
    [[nodiscard]] double signal_strength_at(Vec2 p, std::size_t bs) const;
    [[nodiscard]] double signal_strength_at(LatLon p, std::size_t bs) const;
    [[nodiscard]] std::size_t strongest(Vec2 p) const;
    /// Switches to the strongest alternative only if it beats the current
    /// station by more than the hysteresis margin.
    [[nodiscard]] std::size_t handoff_step(Vec2 p, std::size_t current) const;

  private:
    WorldConfig config_;
    RoadGraph graph_;
    LocalFrame frame_;
    std::vector<Vec2> stations_;
};

struct DrivePlan {
    Route route;
    std::vector<double> speeds_mps;   // one per segment
    std::vector<double> stops_s;      // wait before each segment (0 = none)
    std::uint64_t seed = 0;           // noise stream

    void validate(const RoadGraph& graph) const;
};

/// Draws speeds and stops for `route`. A drive never waits before its first
/// segment unless `stop_at_start` is set.
[[nodiscard]] DrivePlan make_drive_plan(const World& world, const Route& route,
                                        std::uint64_t plan_seed, bool stop_at_start = false);

struct DriveResult {
    PowerTrace trace;                        // power plus per-sample ground truth
    std::vector<std::size_t> attachment;     // serving station per sample
    std::vector<std::size_t> segment_start;  // first sample of each segment (incl. its stop)
};

[[nodiscard]] DriveResult simulate_drive(const World& world, const DrivePlan& plan);

/// Adds a rectangular pulse over [start_s, start_s + duration_s).
void inject_transient(PowerTrace& trace, double start_s, double duration_s, double amplitude_mw);

/// Adds Poisson transients per `noise` and `base_draw_mw`; returns their count.
std::size_t add_transients(PowerTrace& trace, const NoiseModel& noise, double base_draw_mw,
                           std::uint64_t seed);

/// Every (x, y, z) with both segments present and z != x; plus (s, y, z) for
/// every segment when `with_standing_starts`.
[[nodiscard]] std::vector<Triple> feasible_triples(const RoadGraph& graph,
                                                   bool with_standing_starts = true);

struct LibrarySpec {
    std::size_t segment_repetitions = 3;
    bool standing_starts = true;
    std::map<std::string, Route> routes;  // whole-route references
    std::size_t route_repetitions = 0;
    std::uint64_t seed = 1;
};

/// Drives every feasible triple (x -> y -> z, keeping the y -> z part) and
/// every listed route the configured number of times.
[[nodiscard]] ReferenceLibrary build_reference_library(const World& world, const LibrarySpec& spec,
                                                       unsigned jobs = 1);

/// Seed of the r-th recording of a triple or route label.
[[nodiscard]] std::uint64_t recording_seed(std::uint64_t base, const Triple& triple,
                                           std::size_t repetition);
[[nodiscard]] std::uint64_t recording_seed(std::uint64_t base, const std::string& label,
                                           std::size_t repetition);

/// A jittered square lattice of stations covering the graph's bounding box.
[[nodiscard]] std::vector<BaseStation> place_base_stations(const RoadGraph& graph,
                                                           double spacing_m,
                                                           double reference_signal_dbm,
                                                           std::uint64_t seed);

// World file: {"config": {...}, "graph": {...}}; unknown keys are rejected.
[[nodiscard]] std::string world_to_json(const World& world);
[[nodiscard]] World world_from_json(const std::string& text);
void save_world(const std::filesystem::path& path, const World& world);
[[nodiscard]] World load_world(const std::filesystem::path& path);

}  // namespace powerloc
