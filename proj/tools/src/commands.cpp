#include "commands.hpp"

#include <powerloc/classifier.hpp>
#include <powerloc/decoders.hpp>
#include <powerloc/eval.hpp>
#include <powerloc/fixtures.hpp>
#include <powerloc/io.hpp>
#include <powerloc/particle_filter.hpp>
#include <powerloc/preprocess.hpp>
#include <powerloc/rng.hpp>
#include <powerloc/similarity.hpp>
#include <powerloc/synthworld.hpp>
#include <powerloc/tracker.hpp>

#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace powerloc::cli {

namespace {

using json = nlohmann::ordered_json;

// Stream tags so that each subcommand draws from its own seed stream.
constexpr std::uint64_t kStationStream = 0xb5;
constexpr std::uint64_t kBaselineStream = 0xba5e;

void log(const std::string& message) {
    std::clog << "powerloc: " << message << '\n';
}

fs::path output(const Context& ctx, const std::string& name) {
    fs::create_directories(ctx.out);
    return ctx.out / name;
}

void write_output(const Context& ctx, const std::string& name, const std::string& text) {
    const auto path = output(ctx, name);
    io::write_text_file(path, text);
    log("wrote " + path.string());
}

std::string dump(const json& doc) {
    return doc.dump(2) + "\n";
}

RoadGraph fixture_graph(const std::string& name) {
    if (name == "grid13") {
        return fixtures::grid13();
    }
    if (name == "tiny4") {
        return fixtures::tiny4();
    }
    if (name == "single_path") {
        return fixtures::single_path();
    }
    throw std::invalid_argument("unknown graph fixture '" + name + "'");
}

Route parse_valid_route(const RoadGraph& graph, const std::string& text) {
    Route route = Route::parse(text);
    if (const auto bad = validate_route(graph, route)) {
        throw FormatError("route " + route.to_string() + " has no segment " +
                          std::to_string(bad->from) + "->" + std::to_string(bad->to));
    }
    return route;
}

const PreprocessConfig& stage_config(const RunConfig& cfg, const std::string& stage) {
    if (stage == "classifier") {
        return cfg.preprocess;
    }
    if (stage == "tracker") {
        return cfg.tracker.preprocess;
    }
    if (stage == "inference") {
        return cfg.inference.preprocess;
    }
    throw std::invalid_argument("unknown stage '" + stage + "'");
}

json route_json(const Route& route) {
    return route.empty() ? json(nullptr) : json(route.to_string());
}

}  // namespace

void require_exists(const fs::path& path) {
    if (!fs::exists(path)) {
        throw MissingFileError("no such file or directory: " + path.string());
    }
}

void gen_world(const Context& ctx, const GenWorldArgs& args) {
    const RoadGraph graph = args.graph.empty() ? fixture_graph(args.fixture) : io::load_graph(args.graph);
    const auto& synth = ctx.config.synthworld;
    WorldConfig cfg = synth.world;
    cfg.seed = ctx.config.seed;
    if (cfg.base_stations.empty()) {
        cfg.base_stations =
            place_base_stations(graph, synth.station_spacing_m, synth.station_reference_dbm,
                                derive_seed(cfg.seed, kStationStream));
    }
    const World world(std::move(cfg), graph);
    const auto path = output(ctx, "world.json");
    save_world(path, world);
    log("wrote " + path.string() + " (" + std::to_string(graph.intersections().size()) +
        " intersections, " + std::to_string(graph.segments().size()) + " segments, " +
        std::to_string(world.station_count()) + " stations)");
}

void gen_library(const Context& ctx, const GenLibraryArgs& args) {
    const World world = load_world(args.world);
    const auto& synth = ctx.config.synthworld;
    LibrarySpec spec;
    spec.segment_repetitions = args.no_segments ? 0 : synth.segment_repetitions;
    spec.route_repetitions = synth.route_repetitions;
    spec.seed = ctx.config.seed;
    if (args.route_fixture == "routes8") {
        spec.routes = fixtures::routes8();
    } else if (!args.route_fixture.empty()) {
        throw std::invalid_argument("unknown route fixture '" + args.route_fixture + "'");
    }
    for (const auto& item : args.routes) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument("--route expects label=route, got '" + item + "'");
        }
        spec.routes[item.substr(0, eq)] = parse_valid_route(world.graph(), item.substr(eq + 1));
    }
    for (const auto& [label, route] : spec.routes) {
        parse_valid_route(world.graph(), route.to_string());
    }
    log("driving " + std::to_string(spec.routes.size()) + " routes and " +
        (args.no_segments ? std::string("no") : std::to_string(feasible_triples(world.graph()).size())) +
        " segment triples");
    const ReferenceLibrary library = build_reference_library(world, spec, ctx.jobs);
    const auto dir = output(ctx, "library");
    io::save_library(dir, library);
    log("wrote " + dir.string());
}

void gen_drive(const Context& ctx, const GenDriveArgs& args) {
    const World world = load_world(args.world);
    const Route route = parse_valid_route(world.graph(), args.route);
    const DrivePlan plan = make_drive_plan(world, route, ctx.config.seed, args.stop_at_start);
    const DriveResult drive = simulate_drive(world, plan);

    const auto path = output(ctx, "drive.csv");
    io::save_trace(path, drive.trace);
    log("wrote " + path.string());

    json doc;
    doc["route"] = route.to_string();
    doc["seed"] = plan.seed;
    doc["sample_period_s"] = drive.trace.sample_period;
    doc["duration_s"] = drive.trace.duration();
    doc["speeds_mps"] = plan.speeds_mps;
    doc["stops_s"] = plan.stops_s;
    json starts = json::array();
    for (const auto index : drive.segment_start) {
        starts.push_back(static_cast<double>(index) * drive.trace.sample_period);
    }
    doc["segment_start_s"] = std::move(starts);
    write_output(ctx, "drive.json", dump(doc));
}

void run_preprocess(const Context& ctx, const PreprocessArgs& args) {
    const PreprocessConfig& cfg = stage_config(ctx.config, args.stage);
    const PowerTrace trace = io::load_trace(args.trace);
    const auto path = output(ctx, "preprocessed.csv");
    io::save_trace(path, preprocess(trace, cfg));
    log("wrote " + path.string());
}

void run_dist(const Context& ctx, const DistArgs& args) {
    PowerTrace query = io::load_trace(args.query);
    PowerTrace target = io::load_trace(args.target);
    if (!args.raw) {
        query = preprocess(query, ctx.config.preprocess);
        target = preprocess(target, ctx.config.preprocess);
    }
    const std::span<const double> a = query.samples;
    const std::span<const double> b = target.samples;

    json doc;
    doc["method"] = args.method;
    Alignment alignment;
    if (args.method == "dtw") {
        alignment = dtw_distance(a, b);
    } else if (args.method == "subsequence") {
        alignment = subsequence_dtw(a, b);
    } else if (args.method == "osb") {
        OsbMode mode = OsbMode::full;
        if (args.osb_mode == "subsequence") {
            mode = OsbMode::subsequence;
        } else if (args.osb_mode != "full") {
            throw std::invalid_argument("unknown OSB mode '" + args.osb_mode + "'");
        }
        const double jump = args.jump_cost ? *args.jump_cost : default_jump_cost(a, b);
        alignment = osb(a, b, jump, mode);
        doc["osb_mode"] = args.osb_mode;
    } else {
        throw std::invalid_argument("unknown method '" + args.method + "'");
    }
    doc["query_length"] = a.size();
    doc["target_length"] = b.size();
    doc["distance"] = alignment.distance;
    doc["normalized_distance"] = alignment.normalized_distance();
    doc["steps"] = alignment.steps();
    doc["start_offset"] = alignment.start_offset;
    doc["end_offset"] = alignment.end_offset;
    if (args.method == "osb") {
        doc["jump_cost"] = alignment.jump_cost;
        doc["skipped_query"] = alignment.skipped_query.size();
        doc["skipped_target"] = alignment.skipped_target.size();
    }
    std::cout << doc.dump() << '\n';
    write_output(ctx, "dist.json", dump(doc));
}

void run_classify(const Context& ctx, const ClassifyArgs& args) {
    const ReferenceLibrary library = io::load_library(args.library);
    const PowerTrace query = io::load_trace(args.query);
    const ClassificationResult result = classify_route(query, library, ctx.config.preprocess, ctx.jobs);

    json doc;
    doc["label"] = result.predicted_label;
    doc["margin"] = result.margin;
    json scores = json::object();
    for (const auto& [label, score] : result.per_label_scores) {
        scores[label] = score;
    }
    doc["scores"] = std::move(scores);
    std::cout << result.predicted_label << '\n';
    write_output(ctx, "classify.json", dump(doc));
}

void run_xval(const Context& ctx, const XvalArgs& args) {
    const ReferenceLibrary library = io::load_library(args.library);
    const auto& settings = ctx.config.classifier;
    const CrossValidationRow row = cross_validate(
        library, args.refs_per_route.value_or(settings.refs_per_route),
        args.iterations.value_or(settings.iterations), ctx.config.seed, ctx.config.preprocess,
        ctx.jobs);
    const std::string text = xval_csv_header() + "\n" + xval_csv_row(row) + "\n";
    std::cout << text;
    write_output(ctx, "xval.csv", text);
}

void run_track(const Context& ctx, const TrackArgs& args) {
    const ReferenceLibrary library = io::load_library(args.library);
    const PowerTrace stream = io::load_trace(args.stream);
    TrackingVariant variant;
    variant.motion_model = args.motion;
    if (args.matcher == "dtw") {
        variant.matcher = Matcher::dtw;
    } else if (args.matcher == "osb") {
        variant.matcher = Matcher::osb;
    } else {
        throw std::invalid_argument("unknown matcher '" + args.matcher + "'");
    }
    const TrackerConfig& cfg = ctx.config.tracker;
    const TrackingRun run = run_tracking(stream, library, cfg, variant, ctx.jobs);

    std::string csv = "t_s,label,end_offset,lat,lon,score,corrected,error_m\n";
    for (std::size_t k = 0; k < run.estimates.size(); ++k) {
        const auto& e = run.estimates[k];
        csv += io::format_double(e.t_s) + "," + e.route_label + "," + std::to_string(e.end_offset) +
               "," + io::format_double(e.position.lat) + "," + io::format_double(e.position.lon) +
               "," + io::format_double(e.score) + "," + (e.corrected ? "1" : "0") + "," +
               (run.errors_m.empty() ? "" : io::format_double(run.errors_m[k])) + "\n";
    }
    write_output(ctx, "track.csv", csv);

    if (!stream.ground_truth) {
        return;
    }
    std::vector<LatLon> estimates;
    std::vector<LatLon> truth;
    std::vector<double> times;
    for (std::size_t k = 0; k < run.estimates.size(); ++k) {
        estimates.push_back(run.estimates[k].position);
        truth.push_back((*stream.ground_truth)[tick_sample_count(stream, cfg.update_interval_s, k) - 1]);
        times.push_back(run.estimates[k].t_s);
    }
    const std::string scenario = std::string("track_") + args.matcher + (args.motion ? "_motion" : "_plain");
    const EvalReport report = tracking_error_report(estimates, truth, times, run.error_bound_m,
                                                    cfg.convergence_dwell, scenario);
    std::cout << report_csv(report);
    write_output(ctx, "track_report.json", report_json(report));
}

void run_infer(const Context& ctx, const InferArgs& args) {
    if (args.graph.empty() == args.world.empty()) {
        throw std::invalid_argument("infer needs exactly one of --graph and --world");
    }
    const RoadGraph graph = args.graph.empty() ? load_world(args.world).graph() : io::load_graph(args.graph);
    if (!graph.has_intersection(args.start)) {
        throw std::invalid_argument("start intersection " + std::to_string(args.start) +
                                    " is not in the graph");
    }
    const ReferenceLibrary library = io::load_library(args.library);
    const PowerTrace observation = io::load_trace(args.observation);
    const InferenceConfig& cfg = ctx.config.inference;
    const std::size_t n = args.particles.value_or(cfg.particles);

    const HmmModel model = build_model(graph, library, args.start, cfg, std::nullopt, ctx.jobs);
    const PreparedObservation prepared = prepare_observation(observation, cfg);
    log("running " + std::to_string(n) + " particles");
    const auto particles =
        run_particle_filter(prepared, model, n, cfg.max_iterations, ctx.config.seed, ctx.jobs);
    const auto routes = routes_of(particles);
    const RouteEstimates estimates = estimate_pair(routes, graph);

    std::vector<std::pair<Route, std::size_t>> histogram;
    for (const auto& entry : route_histogram(routes)) {
        histogram.push_back(entry);
    }
    std::stable_sort(histogram.begin(), histogram.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::string csv = "route,count,probability\n";
    for (const auto& [route, count] : histogram) {
        csv += route.to_string() + "," + std::to_string(count) + "," +
               io::format_double(static_cast<double>(count) / static_cast<double>(routes.size())) + "\n";
    }
    write_output(ctx, "p_final.csv", csv);

    json doc;
    doc["start"] = args.start;
    doc["particles"] = n;
    doc["seed"] = ctx.config.seed;
    doc["frequent"] = route_json(estimates.frequent);
    doc["imv"] = route_json(estimates.imv);
    doc["distinct_routes"] = histogram.size();
    if (!args.truth.empty()) {
        const Route truth = parse_valid_route(graph, args.truth);
        doc["truth"] = truth.to_string();
        const std::vector<Route> truths{truth};
        const std::vector<RouteEstimates> all{estimates};
        const DecoderScores random =
            random_route_baseline(graph, truths, ctx.config.eval.baseline_trials,
                                  derive_seed(ctx.config.seed, kBaselineStream));
        write_output(ctx, "infer_report.json",
                     report_json(route_inference_report(all, truths, random, "infer")));
    }
    std::cout << "frequent " << estimates.frequent.to_string() << "\nimv " << estimates.imv.to_string()
              << '\n';
    write_output(ctx, "routes.json", dump(doc));
}

void run_report(const Context& ctx, const ReportArgs& args) {
    std::string csv;
    json merged = json::array();
    for (const auto& path : args.inputs) {
        const EvalReport report = report_from_json(io::read_text_file(path));
        csv += report_csv(report, csv.empty());
        merged.push_back(json::parse(report_json(report)));
    }
    std::cout << csv;
    write_output(ctx, "report.csv", csv);
    write_output(ctx, "report.json", dump(merged));
}

}  // namespace powerloc::cli
