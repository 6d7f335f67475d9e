#pragma once

#include <powerloc/config.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace powerloc::cli {

namespace fs = std::filesystem;

/// Resolved global state shared by every subcommand.
struct Context {
    RunConfig config;
    unsigned jobs = 1;
    fs::path out;
};

struct GenWorldArgs {
    std::string fixture = "grid13";
    fs::path graph;  // overrides the fixture when set
};

struct GenLibraryArgs {
    fs::path world;
    std::string route_fixture;            // "routes8" or empty
    std::vector<std::string> routes;      // "label=1-2-3"
    bool no_segments = false;
};

struct GenDriveArgs {
    fs::path world;
    std::string route;
    bool stop_at_start = false;
};

struct PreprocessArgs {
    fs::path trace;
    std::string stage = "classifier";
};

struct DistArgs {
    fs::path query;
    fs::path target;
    std::string method = "dtw";
    std::string osb_mode = "full";
    std::optional<double> jump_cost;
    bool raw = false;
};

struct ClassifyArgs {
    fs::path library;
    fs::path query;
};

struct XvalArgs {
    fs::path library;
    std::optional<std::size_t> refs_per_route;
    std::optional<std::size_t> iterations;
};

struct TrackArgs {
    fs::path library;
    fs::path stream;
    std::string matcher = "dtw";
    bool motion = false;
};

struct InferArgs {
    fs::path observation;
    fs::path graph;
    fs::path world;
    fs::path library;
    int start = 0;
    std::optional<std::size_t> particles;
    std::string truth;
};

struct ReportArgs {
    std::vector<fs::path> inputs;
};

void gen_world(const Context& ctx, const GenWorldArgs& args);
void gen_library(const Context& ctx, const GenLibraryArgs& args);
void gen_drive(const Context& ctx, const GenDriveArgs& args);
void run_preprocess(const Context& ctx, const PreprocessArgs& args);
void run_dist(const Context& ctx, const DistArgs& args);
void run_classify(const Context& ctx, const ClassifyArgs& args);
void run_xval(const Context& ctx, const XvalArgs& args);
void run_track(const Context& ctx, const TrackArgs& args);
void run_infer(const Context& ctx, const InferArgs& args);
void run_report(const Context& ctx, const ReportArgs& args);

/// Throws MissingFileError unless `path` exists.
void require_exists(const fs::path& path);

}  // namespace powerloc::cli
