#pragma once

#include "powerloc/hmm.hpp"
#include "powerloc/preprocess.hpp"
#include "powerloc/synthworld.hpp"
#include "powerloc/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace powerloc {

struct ClassifierSettings {
    std::size_t refs_per_route = 10;
    std::size_t iterations = 20;
};

struct SynthSettings {
    WorldConfig world;                   // base_stations empty: placed on a lattice
    double station_spacing_m = 600.0;
    double station_reference_dbm = -55.0;
    std::size_t segment_repetitions = 3;
    std::size_t route_repetitions = 16;  // 10 training + 6 test drives per route
};

struct EvalSettings {
    std::size_t baseline_trials = 10000;
    std::size_t min_segments = 3;
    std::size_t max_segments = 7;
};

/// Everything a CLI run needs. JSON layout:
///
///   {"seed": 1,
///    "preprocess": {...}, "classifier": {...}, "tracker": {...},
///    "route_inference": {...}, "synthworld": {...}, "eval": {...}}
///
/// Every key is optional and defaults to the values below; unknown keys are
/// an error.
struct RunConfig {
    std::uint64_t seed = 1;
    PreprocessConfig preprocess;
    ClassifierSettings classifier;
    TrackerConfig tracker;
    InferenceConfig inference;
    SynthSettings synthworld;
    EvalSettings eval;

    void validate() const;
};

[[nodiscard]] RunConfig run_config_from_json(const std::string& text);
[[nodiscard]] std::string run_config_to_json(const RunConfig& cfg);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace powerloc
