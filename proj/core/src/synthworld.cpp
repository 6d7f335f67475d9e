#include "powerloc/synthworld.hpp"

#include "powerloc/io.hpp"
#include "powerloc/parallel.hpp"
#include "powerloc/rng.hpp"

#include "config_json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace powerloc {

namespace {

constexpr std::uint64_t kShadowStream = 0x5ad0'5ad0ULL;
constexpr std::uint64_t kNoiseStream = 0x0157'0157ULL;
constexpr std::uint64_t kPlanStream = 0x91a0'91a0ULL;
constexpr std::uint64_t kTransientStream = 0x7a45'7a45ULL;

/// Standard normal as a pure function of a 64-bit key (Box-Muller on two
/// hashed uniforms). Cheap enough to evaluate per sample per station.
double hashed_normal(std::uint64_t key) {
    const std::uint64_t a = mix64(key);
    const std::uint64_t b = mix64(a ^ 0x632b'e59b'd9b4'e019ULL);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LocalFrame graph_frame(const RoadGraph& graph) {
    if (graph.intersections().empty()) {
        return LocalFrame(LatLon{0.0, 0.0});
    }
    double lat = 0.0;
    double lon = 0.0;
    for (const auto& [id, p] : graph.intersections()) {
        lat += p.lat;
        lon += p.lon;
    }
    const auto n = static_cast<double>(graph.intersections().size());
    return LocalFrame(LatLon{lat / n, lon / n});
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf2'9ce4'8422'2325ULL;
    for (unsigned char c : text) {
        h = (h ^ c) * 0x100'0000'01b3ULL;
    }
    return h;
}

/// A polyline in local meters with cumulative arc length.
struct Path {
    std::vector<Vec2> points;
    std::vector<double> cumulative;

    [[nodiscard]] double length() const { return cumulative.back(); }

    [[nodiscard]] Vec2 at(double s) const {
        s = std::clamp(s, 0.0, length());
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
        const auto i = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(it - cumulative.begin(), 1,
                                       static_cast<std::ptrdiff_t>(points.size()) - 1));
        const double span = cumulative[i] - cumulative[i - 1];
        const double f = span > 0.0 ? (s - cumulative[i - 1]) / span : 0.0;
        return {points[i - 1].x + f * (points[i].x - points[i - 1].x),
                points[i - 1].y + f * (points[i].y - points[i - 1].y)};
    }
};

Path local_path(const World& world, const Segment& seg) {
    Path path;
    for (const auto& p : seg.polyline) {
        path.points.push_back(world.frame().to_local(p));
    }
    path.cumulative.push_back(0.0);
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        path.cumulative.push_back(path.cumulative.back() +
                                  distance(path.points[i - 1], path.points[i]));
    }
    return path;
}

}  // namespace

double PowerModel::g(double signal_dbm) const {
    const double span = best_signal_dbm - worst_signal_dbm;
    const double t = std::clamp((best_signal_dbm - signal_dbm) / span, 0.0, 1.0);
    return 1.0 + (worst_to_best_ratio - 1.0) * t;
}

void WorldConfig::validate() const {
    if (base_stations.empty()) {
        throw std::invalid_argument("world: at least one base station is required");
    }
    if (!(path_loss_exponent > 0.0)) {
        throw std::invalid_argument("world: path_loss_exponent must be > 0");
    }
    if (!(reference_distance_m > 0.0)) {
        throw std::invalid_argument("world: reference_distance_m must be > 0");
    }
    if (!(shadowing_sigma_db >= 0.0)) {
        throw std::invalid_argument("world: shadowing_sigma_db must be >= 0");
    }
    if (!(shadow_grid_m > 0.0)) {
        throw std::invalid_argument("world: shadow_grid_m must be > 0");
    }
    if (!(hysteresis_db >= 0.0)) {
        throw std::invalid_argument("world: hysteresis_db must be >= 0");
    }
    if (!(power.base_draw_mw >= 0.0) || !(power.radio_coefficient_mw >= 0.0)) {
        throw std::invalid_argument("world: base_draw_mw and radio_coefficient_mw must be >= 0");
    }
    if (!(power.best_signal_dbm > power.worst_signal_dbm)) {
        throw std::invalid_argument("world: best_signal_dbm must exceed worst_signal_dbm");
    }
    if (!(power.worst_to_best_ratio >= 1.0)) {
        throw std::invalid_argument("world: worst_to_best_ratio must be >= 1");
    }
    if (!(noise.gaussian_sigma_mw >= 0.0) || !(noise.transient_rate_hz >= 0.0)) {
        throw std::invalid_argument("world: noise parameters must be >= 0");
    }
    if (!(noise.transient_min_s > 0.0 && noise.transient_min_s <= noise.transient_max_s) ||
        !(noise.transient_min_amplitude >= 0.0 &&
          noise.transient_min_amplitude <= noise.transient_max_amplitude)) {
        throw std::invalid_argument("world: transient ranges must be ordered and positive");
    }
    if (!(drive.min_speed_mps > 0.0 && drive.min_speed_mps <= drive.max_speed_mps)) {
        throw std::invalid_argument("world: speeds must satisfy 0 < min <= max");
    }
    if (!(drive.stop_probability >= 0.0 && drive.stop_probability <= 1.0)) {
        throw std::invalid_argument("world: stop_probability must be in [0, 1]");
    }
    if (!(drive.min_stop_s >= 0.0 && drive.min_stop_s <= drive.max_stop_s)) {
        throw std::invalid_argument("world: stop durations must satisfy 0 <= min <= max");
    }
    if (!(drive.sample_period_s > 0.0)) {
        throw std::invalid_argument("world: sample_period_s must be > 0");
    }
}

World::World(WorldConfig config, RoadGraph graph)
    : config_(std::move(config)), graph_(std::move(graph)), frame_(graph_frame(graph_)) {
    config_.validate();
    graph_.validate();
    for (const auto& bs : config_.base_stations) {
        stations_.push_back(frame_.to_local(bs.position));
    }
}

double World::shadow_db(Vec2 p, std::size_t bs) const {
    if (config_.shadowing_sigma_db == 0.0) {
        return 0.0;
    }
    // Value noise: N(0, 1) at lattice nodes, bilinear in between.
    const double gx = p.x / config_.shadow_grid_m;
    const double gy = p.y / config_.shadow_grid_m;
    const double fx = std::floor(gx);
    const double fy = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = gx - fx;
    const double ty = gy - fy;
    const std::uint64_t base = derive_seed(config_.seed, kShadowStream, bs);
    auto node = [&](std::int64_t x, std::int64_t y) {
        return hashed_normal(base ^ mix64(static_cast<std::uint64_t>(x) * 0x9e37'79b9'7f4a'7c15ULL +
                                          static_cast<std::uint64_t>(y)));
    };
    const double v = (1 - tx) * (1 - ty) * node(ix, iy) + tx * (1 - ty) * node(ix + 1, iy) +
                     (1 - tx) * ty * node(ix, iy + 1) + tx * ty * node(ix + 1, iy + 1);
    return config_.shadowing_sigma_db * v;
}

double World::signal_strength_at(Vec2 p, std::size_t bs) const {
    if (bs >= stations_.size()) {
        throw std::out_of_range("signal_strength_at: unknown base station");
    }
    const double d0 = config_.reference_distance_m;
    const double d = std::max(distance(p, stations_[bs]), d0);
    return config_.base_stations[bs].reference_signal_dbm -
           10.0 * config_.path_loss_exponent * std::log10(d / d0) + shadow_db(p, bs);
}

double World::signal_strength_at(LatLon p, std::size_t bs) const {
    return signal_strength_at(frame_.to_local(p), bs);
}

std::size_t World::strongest(Vec2 p) const {
    std::size_t best = 0;
    double best_signal = -std::numeric_limits<double>::infinity();
    for (std::size_t bs = 0; bs < stations_.size(); ++bs) {
        const double s = signal_strength_at(p, bs);
        if (s > best_signal) {
            best = bs;
            best_signal = s;
        }
    }
    return best;
}

std::size_t World::handoff_step(Vec2 p, std::size_t current) const {
    const double here = signal_strength_at(p, current);
    std::size_t best = current;
    double best_signal = here;
    for (std::size_t bs = 0; bs < stations_.size(); ++bs) {
        if (bs == current) {
            continue;
        }
        const double s = signal_strength_at(p, bs);
        if (s > best_signal) {
            best = bs;
            best_signal = s;
        }
    }
    return best_signal - here > config_.hysteresis_db ? best : current;
}

void DrivePlan::validate(const RoadGraph& graph) const {
    if (route.size() < 2) {
        throw std::invalid_argument("drive plan: route needs at least one segment");
    }
    if (const auto bad = validate_route(graph, route)) {
        throw std::invalid_argument("drive plan: no segment " + std::to_string(bad->from) + "->" +
                                    std::to_string(bad->to));
    }
    if (speeds_mps.size() != route.segment_count() || stops_s.size() != route.segment_count()) {
        throw std::invalid_argument("drive plan: one speed and one stop per segment required");
    }
    for (std::size_t i = 0; i < speeds_mps.size(); ++i) {
        if (!(speeds_mps[i] > 0.0) || !std::isfinite(speeds_mps[i])) {
            throw std::invalid_argument("drive plan: speeds must be positive");
        }
        if (!(stops_s[i] >= 0.0) || !std::isfinite(stops_s[i])) {
            throw std::invalid_argument("drive plan: stops must be finite and >= 0");
        }
    }
}

DrivePlan make_drive_plan(const World& world, const Route& route, std::uint64_t plan_seed,
                          bool stop_at_start) {
    const auto& m = world.config().drive;
    Rng rng(derive_seed(world.config().seed, kPlanStream, plan_seed));
    DrivePlan plan;
    plan.route = route;
    plan.seed = plan_seed;
    for (std::size_t i = 0; i < route.segment_count(); ++i) {
        plan.speeds_mps.push_back(uniform(rng, m.min_speed_mps, m.max_speed_mps));
        const bool stops = uniform01(rng) < m.stop_probability;
        const double wait = uniform(rng, m.min_stop_s, m.max_stop_s);
        plan.stops_s.push_back(stops && (i > 0 || stop_at_start) ? wait : 0.0);
    }
    plan.validate(world.graph());
    return plan;
}

DriveResult simulate_drive(const World& world, const DrivePlan& plan) {
    plan.validate(world.graph());
    const auto& cfg = world.config();
    const double dt = cfg.drive.sample_period_s;

    std::vector<Path> paths;
    std::vector<double> seg_begin;  // time each segment's stop begins
    std::vector<double> move_begin;
    double t = 0.0;
    for (std::size_t i = 0; i < plan.route.segment_count(); ++i) {
        paths.push_back(
            local_path(world, world.graph().segment(plan.route.nodes[i], plan.route.nodes[i + 1])));
        seg_begin.push_back(t);
        t += plan.stops_s[i];
        move_begin.push_back(t);
        t += paths.back().length() / plan.speeds_mps[i];
    }
    const double total = t;
    const auto count = static_cast<std::size_t>(std::ceil(total / dt - 1e-9));

    DriveResult out;
    out.trace.sample_period = dt;
    out.trace.samples.reserve(count);
    out.trace.ground_truth.emplace();
    out.trace.ground_truth->reserve(count);
    out.trace.meta["route"] = plan.route.to_string();
    out.attachment.reserve(count);

    Rng noise(derive_seed(cfg.seed, kNoiseStream, plan.seed));
    std::size_t seg = 0;
    std::size_t serving = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double tk = static_cast<double>(k) * dt;
        while (seg + 1 < paths.size() && tk >= seg_begin[seg + 1] - 1e-9) {
            ++seg;
        }
        while (out.segment_start.size() <= seg) {
            out.segment_start.push_back(k);
        }
        const double moving = std::max(0.0, tk - move_begin[seg]);
        const Vec2 p = paths[seg].at(moving * plan.speeds_mps[seg]);
        serving = k == 0 ? world.strongest(p) : world.handoff_step(p, serving);
        const double signal = world.signal_strength_at(p, serving);
        const double power = cfg.power.base_draw_mw +
                             cfg.power.radio_coefficient_mw * cfg.power.g(signal) +
                             cfg.noise.gaussian_sigma_mw * standard_normal(noise);
        out.trace.samples.push_back(std::max(0.0, power));
        out.trace.ground_truth->push_back(world.frame().to_geo(p));
        out.attachment.push_back(serving);
    }
    // Segments too short to own a sample start at the next one.
    while (out.segment_start.size() < paths.size()) {
        out.segment_start.push_back(count);
    }
    if (cfg.noise.transient_rate_hz > 0.0) {
        add_transients(out.trace, cfg.noise, cfg.power.base_draw_mw,
                       derive_seed(cfg.seed, kTransientStream, plan.seed));
    }
    return out;
}

void inject_transient(PowerTrace& trace, double start_s, double duration_s, double amplitude_mw) {
    const double p = trace.sample_period;
    const auto begin = static_cast<std::size_t>(std::max(0.0, std::floor(start_s / p + 1e-9)));
    const auto end = static_cast<std::size_t>(
        std::max(0.0, std::ceil((start_s + duration_s) / p - 1e-9)));
    for (std::size_t k = begin; k < std::min(end, trace.size()); ++k) {
        trace.samples[k] = std::max(0.0, trace.samples[k] + amplitude_mw);
    }
}

std::size_t add_transients(PowerTrace& trace, const NoiseModel& noise, double base_draw_mw,
                           std::uint64_t seed) {
    if (noise.transient_rate_hz <= 0.0) {
        return 0;
    }
    Rng rng(seed);
    std::size_t added = 0;
    double t = 0.0;
    while (true) {
        t += -std::log(1.0 - uniform01(rng)) / noise.transient_rate_hz;
        if (t >= trace.duration()) {
            break;
        }
        const double duration = uniform(rng, noise.transient_min_s, noise.transient_max_s);
        const double amplitude =
            uniform(rng, noise.transient_min_amplitude, noise.transient_max_amplitude);
        inject_transient(trace, t, duration, amplitude * base_draw_mw);
        ++added;
    }
    return added;
}

std::vector<Triple> feasible_triples(const RoadGraph& graph, bool with_standing_starts) {
    std::vector<Triple> out;
    for (const auto& [key, seg] : graph.segments()) {
        const auto [y, z] = key;
        if (with_standing_starts) {
            out.push_back(Triple{kNoIntersection, y, z});
        }
        for (IntersectionId x : graph.predecessors(y)) {
            if (x != z) {
                out.push_back(Triple{x, y, z});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t recording_seed(std::uint64_t base, const Triple& triple, std::size_t repetition) {
    const auto key = (static_cast<std::uint64_t>(triple.prev + 1) << 42) ^
                     (static_cast<std::uint64_t>(triple.from) << 21) ^
                     static_cast<std::uint64_t>(triple.to);
    return derive_seed(base, mix64(key), repetition);
}

std::uint64_t recording_seed(std::uint64_t base, const std::string& label, std::size_t repetition) {
    return derive_seed(base, fnv1a(label), repetition);
}

ReferenceLibrary build_reference_library(const World& world, const LibrarySpec& spec,
                                         unsigned jobs) {
    struct Task {
        std::optional<Triple> triple;
        const std::string* label = nullptr;
        std::size_t repetition = 0;
    };
    const auto triples = spec.segment_repetitions > 0
                             ? feasible_triples(world.graph(), spec.standing_starts)
                             : std::vector<Triple>{};
    std::vector<Task> tasks;
    for (const auto& t : triples) {
        for (std::size_t r = 0; r < spec.segment_repetitions; ++r) {
            tasks.push_back({t, nullptr, r});
        }
    }
    for (const auto& [label, route] : spec.routes) {
        for (std::size_t r = 0; r < spec.route_repetitions; ++r) {
            tasks.push_back({std::nullopt, &label, r});
        }
    }

    std::vector<PowerTrace> traces(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const auto& task = tasks[i];
        if (task.triple) {
            const auto& t = *task.triple;
            const std::uint64_t seed = recording_seed(spec.seed, t, task.repetition);
            if (t.prev == kNoIntersection) {
                const auto plan = make_drive_plan(world, Route{{t.from, t.to}}, seed, true);
                traces[i] = simulate_drive(world, plan).trace;
            } else {
                const auto plan = make_drive_plan(world, Route{{t.prev, t.from, t.to}}, seed);
                const auto drive = simulate_drive(world, plan);
                const auto cut = static_cast<std::ptrdiff_t>(drive.segment_start[1]);
                PowerTrace& out = traces[i];
                out.sample_period = drive.trace.sample_period;
                out.samples.assign(drive.trace.samples.begin() + cut, drive.trace.samples.end());
                out.ground_truth.emplace(drive.trace.ground_truth->begin() + cut,
                                         drive.trace.ground_truth->end());
            }
            traces[i].meta = {{"triple", t.to_string()}};
        } else {
            const std::uint64_t seed = recording_seed(spec.seed, *task.label, task.repetition);
            const auto plan = make_drive_plan(world, spec.routes.at(*task.label), seed);
            traces[i] = simulate_drive(world, plan).trace;
        }
    });

    ReferenceLibrary library;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].triple) {
            library.segments[*tasks[i].triple].push_back(std::move(traces[i]));
        } else {
            library.routes[*tasks[i].label].push_back(std::move(traces[i]));
        }
    }
    return library;
}

std::vector<BaseStation> place_base_stations(const RoadGraph& graph, double spacing_m,
                                             double reference_signal_dbm, std::uint64_t seed) {
    if (!(spacing_m > 0.0)) {
        throw std::invalid_argument("place_base_stations: spacing must be > 0");
    }
    if (graph.intersections().empty()) {
        throw std::invalid_argument("place_base_stations: empty graph");
    }
    const LocalFrame frame = graph_frame(graph);
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    for (const auto& [id, p] : graph.intersections()) {
        const Vec2 v = frame.to_local(p);
        min_x = std::min(min_x, v.x);
        min_y = std::min(min_y, v.y);
        max_x = std::max(max_x, v.x);
        max_y = std::max(max_y, v.y);
    }
    Rng rng(seed);
    std::vector<BaseStation> out;
    const double half = 0.5 * spacing_m;
    for (double y = min_y - half; y <= max_y + half + 1e-9; y += spacing_m) {
        for (double x = min_x - half; x <= max_x + half + 1e-9; x += spacing_m) {
            const Vec2 p{x + uniform(rng, -0.25, 0.25) * spacing_m,
                         y + uniform(rng, -0.25, 0.25) * spacing_m};
            out.push_back(BaseStation{frame.to_geo(p), reference_signal_dbm});
        }
    }
    return out;
}

std::string world_to_json(const World& world) {
    detail::json doc;
    doc["config"] = detail::to_json(world.config());
    doc["graph"] = detail::json::parse(io::graph_to_json(world.graph()));
    return doc.dump(1) + "\n";
}

World world_from_json(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw FormatError(std::string("world: invalid JSON: ") + e.what());
    }
    detail::ObjectReader reader(doc, "world");
    const auto* config = reader.child("config");
    const auto* graph = reader.child("graph");
    reader.finish();
    if (!config || !graph) {
        throw FormatError("world: 'config' and 'graph' are required");
    }
    WorldConfig cfg;
    detail::read_into(*config, "world.config", cfg);
    auto g = io::graph_from_json(graph->dump());
    try {
        return World(std::move(cfg), std::move(g));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

void save_world(const std::filesystem::path& path, const World& world) {
    io::write_text_file(path, world_to_json(world));
}

World load_world(const std::filesystem::path& path) { return world_from_json(io::read_text_file(path)); }

}  // namespace powerloc
