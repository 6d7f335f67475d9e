#include "commands.hpp"

#include <powerloc/hmm.hpp>
#include <powerloc/parallel.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <iostream>

namespace {

using namespace powerloc;
using namespace powerloc::cli;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingFile = 3,
    kFormat = 4,
    kCoverage = 5,
};

int fail(int code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json line;
    line["error"] = kind;
    line["message"] = message;
    line["exit_code"] = code;
    std::cerr << line.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Location inference from aggregate power traces."};
    app.require_subcommand(1);
    app.fallthrough();

    fs::path config_path;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    fs::path out;
    app.add_option("--config", config_path, "Run-config JSON; every key optional, flags win")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Global seed (overrides the config's seed, default 1)");
    app.add_option("--jobs", jobs, "Worker threads; 0 = all cores")->capture_default_str();
    app.add_option("--out", out, "Output directory (created if missing)")->required();

    std::function<void(const Context&)> action;
    std::vector<fs::path> inputs;  // checked before anything runs

    auto* gen = app.add_subcommand("gen", "Generate synthetic worlds, libraries and drives");
    gen->require_subcommand(1);

    GenWorldArgs world_args;
    auto* gen_world_cmd = gen->add_subcommand("world", "Road graph plus base stations -> world.json");
    gen_world_cmd->add_option("--fixture", world_args.fixture, "grid13 | tiny4 | single_path")
        ->capture_default_str();
    gen_world_cmd->add_option("--graph", world_args.graph, "Graph JSON (replaces --fixture)");
    gen_world_cmd->callback([&] {
        if (!world_args.graph.empty()) {
            inputs.push_back(world_args.graph);
        }
        action = [&](const Context& ctx) { gen_world(ctx, world_args); };
    });

    GenLibraryArgs library_args;
    auto* gen_library_cmd = gen->add_subcommand("library", "Segment and route references -> library/");
    gen_library_cmd->add_option("--world", library_args.world, "World JSON")->required();
    gen_library_cmd->add_option("--routes", library_args.route_fixture,
                                "Route fixture to record whole (routes8)");
    gen_library_cmd->add_option("--route", library_args.routes, "Extra whole route, label=1-2-3");
    gen_library_cmd->add_flag("--no-segments", library_args.no_segments,
                              "Record whole routes only");
    gen_library_cmd->callback([&] {
        inputs.push_back(library_args.world);
        action = [&](const Context& ctx) { gen_library(ctx, library_args); };
    });

    GenDriveArgs drive_args;
    auto* gen_drive_cmd = gen->add_subcommand("drive", "One noisy drive -> drive.csv, drive.json");
    gen_drive_cmd->add_option("--world", drive_args.world, "World JSON")->required();
    gen_drive_cmd->add_option("--route", drive_args.route, "Intersections, e.g. 1-2-5")->required();
    gen_drive_cmd->add_flag("--stop-at-start", drive_args.stop_at_start,
                            "Allow a stop before the first segment");
    gen_drive_cmd->callback([&] {
        inputs.push_back(drive_args.world);
        action = [&](const Context& ctx) { gen_drive(ctx, drive_args); };
    });

    PreprocessArgs preprocess_args;
    auto* preprocess_cmd = app.add_subcommand("preprocess", "Apply a stage's preprocessing -> preprocessed.csv");
    preprocess_cmd->add_option("--trace", preprocess_args.trace, "Trace CSV")->required();
    preprocess_cmd->add_option("--stage", preprocess_args.stage, "classifier | tracker | inference")
        ->capture_default_str();
    preprocess_cmd->callback([&] {
        inputs.push_back(preprocess_args.trace);
        action = [&](const Context& ctx) { run_preprocess(ctx, preprocess_args); };
    });

    DistArgs dist_args;
    auto* dist_cmd = app.add_subcommand("dist", "Distance and offsets between two traces -> dist.json");
    dist_cmd->add_option("query", dist_args.query, "Query trace CSV")->required();
    dist_cmd->add_option("target", dist_args.target, "Target trace CSV")->required();
    dist_cmd->add_option("--method", dist_args.method, "dtw | subsequence | osb")->capture_default_str();
    dist_cmd->add_option("--osb-mode", dist_args.osb_mode, "full | subsequence")->capture_default_str();
    dist_cmd->add_option("--jump-cost", dist_args.jump_cost,
                         "OSB jump cost (default: mean + std of all pairwise costs)");
    dist_cmd->add_flag("--raw", dist_args.raw, "Skip the classifier preprocessing");
    dist_cmd->callback([&] {
        inputs.push_back(dist_args.query);
        inputs.push_back(dist_args.target);
        action = [&](const Context& ctx) { run_dist(ctx, dist_args); };
    });

    ClassifyArgs classify_args;
    auto* classify_cmd = app.add_subcommand("classify", "1-NN route label for one trace -> classify.json");
    classify_cmd->add_option("--library", classify_args.library, "Library directory")->required();
    classify_cmd->add_option("--trace", classify_args.query, "Query trace CSV")->required();
    classify_cmd->callback([&] {
        inputs.push_back(classify_args.library);
        inputs.push_back(classify_args.query);
        action = [&](const Context& ctx) { run_classify(ctx, classify_args); };
    });

    XvalArgs xval_args;
    auto* xval_cmd = app.add_subcommand("xval", "Cross-validated identification rate -> xval.csv");
    xval_cmd->add_option("--library", xval_args.library, "Library directory")->required();
    xval_cmd->add_option("--refs-per-route", xval_args.refs_per_route,
                         "Training references per route (config default 10)");
    xval_cmd->add_option("--iterations", xval_args.iterations, "Random splits (config default 20)");
    xval_cmd->callback([&] {
        inputs.push_back(xval_args.library);
        action = [&](const Context& ctx) { run_xval(ctx, xval_args); };
    });

    TrackArgs track_args;
    auto* track_cmd = app.add_subcommand("track", "Per-tick location estimates -> track.csv");
    track_cmd->add_option("--library", track_args.library, "Library directory")->required();
    track_cmd->add_option("--stream", track_args.stream, "Stream trace CSV")->required();
    track_cmd->add_option("--matcher", track_args.matcher, "dtw | osb")->capture_default_str();
    track_cmd->add_flag("--motion", track_args.motion, "Apply the lock-state motion model");
    track_cmd->callback([&] {
        inputs.push_back(track_args.library);
        inputs.push_back(track_args.stream);
        action = [&](const Context& ctx) { run_track(ctx, track_args); };
    });

    InferArgs infer_args;
    auto* infer_cmd = app.add_subcommand("infer", "Particle-filter route inference -> routes.json, p_final.csv");
    infer_cmd->add_option("--observation", infer_args.observation, "Observation trace CSV")->required();
    auto* graph_opt = infer_cmd->add_option("--graph", infer_args.graph, "Graph JSON");
    infer_cmd->add_option("--world", infer_args.world, "World JSON (its graph is used)")->excludes(graph_opt);
    infer_cmd->add_option("--library", infer_args.library, "Library directory")->required();
    infer_cmd->add_option("--start", infer_args.start, "Start intersection")->required();
    infer_cmd->add_option("--particles", infer_args.particles, "Particle count (config default 500)");
    infer_cmd->add_option("--truth", infer_args.truth, "True route, adds infer_report.json");
    infer_cmd->callback([&] {
        inputs.push_back(infer_args.observation);
        inputs.push_back(infer_args.graph.empty() ? infer_args.world : infer_args.graph);
        inputs.push_back(infer_args.library);
        action = [&](const Context& ctx) { run_infer(ctx, infer_args); };
    });

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "Merge report JSON files -> report.csv, report.json");
    report_cmd->add_option("inputs", report_args.inputs, "Report JSON files")->required();
    report_cmd->callback([&] {
        inputs.insert(inputs.end(), report_args.inputs.begin(), report_args.inputs.end());
        action = [&](const Context& ctx) { run_report(ctx, report_args); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, "usage", e.what());
    }

    try {
        Context ctx;
        try {
            if (!config_path.empty()) {
                ctx.config = load_run_config(config_path);
            }
            if (seed) {
                ctx.config.seed = *seed;
            }
            ctx.config.validate();
        } catch (const FormatError& e) {
            return fail(kUsage, "config", e.what());
        }
        ctx.jobs = resolve_jobs(jobs);
        ctx.out = out;
        for (const auto& path : inputs) {
            if (path.empty()) {
                return fail(kUsage, "usage", "infer needs --graph or --world");
            }
            require_exists(path);
        }
        action(ctx);
    } catch (const MissingFileError& e) {
        return fail(kMissingFile, "missing_file", e.what());
    } catch (const CoverageError& e) {
        return fail(kCoverage, "coverage", e.what());
    } catch (const FormatError& e) {
        return fail(kFormat, "format", e.what());
    } catch (const InferenceError& e) {
        return fail(kFailure, "inference", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kUsage, "invalid_argument", e.what());
    } catch (const std::exception& e) {
        return fail(kFailure, "internal", e.what());
    }
    return kOk;
}
