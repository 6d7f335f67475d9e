// Acceptance checks, one line per criterion:
//
//   acceptance [--cli <path-to-powerloc>] [criterion...]
//
// Exit status is non-zero if any selected criterion fails.

#include "oracles.hpp"

#include "powerloc/classifier.hpp"
#include "powerloc/decoders.hpp"
#include "powerloc/eval.hpp"
#include "powerloc/fixtures.hpp"
#include "powerloc/hmm.hpp"
#include "powerloc/particle_filter.hpp"
#include "powerloc/preprocess.hpp"
#include "powerloc/rng.hpp"
#include "powerloc/similarity.hpp"
#include "powerloc/synthworld.hpp"
#include "powerloc/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace powerloc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<double> random_ints(Rng& rng, std::size_t n, int lo, int hi) {
    std::vector<double> out(n);
    for (auto& v : out) {
        v = static_cast<double>(lo + static_cast<int>(uniform_index(rng, hi - lo + 1)));
    }
    return out;
}

// 1 ---------------------------------------------------------------------------

Outcome dtw_oracle() {
    Rng rng(101);
    std::size_t matched = 0;
    const std::size_t cases = 1000;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto a = random_ints(rng, 1 + uniform_index(rng, 8), -5, 5);
        const auto b = random_ints(rng, 1 + uniform_index(rng, 8), -5, 5);
        const auto got = dtw_distance(a, b);
        const auto want = oracle::dtw_paths(a, b);
        matched += (got.distance == want.cost && oracle::dtw(a, b) == want.cost &&
                    got.path.size() == want.longest)
                       ? 1
                       : 0;
    }
    return {matched == cases, fmt("%zu/%zu pairs match the path enumeration", matched, cases)};
}

// 2 ---------------------------------------------------------------------------

Outcome subsequence_oracle() {
    Rng rng(202);
    std::size_t matched = 0;
    const std::size_t cases = 300;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto q = random_ints(rng, 1 + uniform_index(rng, 5), 0, 4);
        const auto t = random_ints(rng, q.size() + uniform_index(rng, 13 - q.size()), 0, 4);
        const auto got = subsequence_dtw(q, t);
        const auto want = oracle::subsequence_all_windows(q, t);
        matched += (got.distance == want.cost && got.start_offset == want.start &&
                    got.end_offset == want.end)
                       ? 1
                       : 0;
    }
    // Exact embeddings: the query copied into a random target.
    std::size_t embedded_ok = 0;
    const std::size_t embedded = 50;
    for (std::size_t c = 0; c < embedded; ++c) {
        auto t = random_ints(rng, 12, 10, 20);
        // Values absent from t and no repeated neighbours, so the shortest
        // zero-cost window is the embedding itself.
        auto q = random_ints(rng, 1 + uniform_index(rng, 5), 0, 4);
        for (std::size_t i = 1; i < q.size(); ++i) {
            if (q[i] == q[i - 1]) {
                q[i] = q[i - 1] == 4 ? 0 : q[i - 1] + 1;
            }
        }
        const std::size_t at = uniform_index(rng, t.size() - q.size() + 1);
        std::copy(q.begin(), q.end(), t.begin() + static_cast<std::ptrdiff_t>(at));
        const auto got = subsequence_dtw(q, t);
        embedded_ok += (got.distance == 0.0 && got.start_offset == at &&
                        got.end_offset == at + q.size() - 1)
                           ? 1
                           : 0;
    }
    return {matched == cases && embedded_ok == embedded,
            fmt("%zu/%zu random cases match all-windows oracle; %zu/%zu exact embeddings found",
                matched, cases, embedded_ok, embedded)};
}

// 3 ---------------------------------------------------------------------------

Outcome osb_oracle() {
    Rng rng(303);
    const double jump_costs[] = {0.5, 2.0, 7.0};
    std::size_t matched = 0;
    std::size_t total = 0;
    for (std::size_t c = 0; c < 200; ++c) {
        const auto q = random_ints(rng, 1 + uniform_index(rng, 6), 0, 9);
        const auto t = random_ints(rng, 1 + uniform_index(rng, 6), 0, 9);
        for (double jc : jump_costs) {
            for (const auto mode : {OsbMode::full, OsbMode::subsequence}) {
                const double got = osb(q, t, jc, mode).distance;
                const double want = oracle::osb_bijections(q, t, jc, mode == OsbMode::subsequence);
                matched += std::abs(got - want) < 1e-9 ? 1 : 0;
                ++total;
            }
        }
    }
    return {matched == total,
            fmt("%zu/%zu (pair, jump cost, mode) cases match the bijection enumeration", matched,
                total)};
}

// 4 ---------------------------------------------------------------------------

Outcome route_distinguishability() {
    const auto graph = fixtures::grid13();
    const auto world = fixtures::make_world(graph, 4004);
    const auto routes = fixtures::routes8();

    LibrarySpec spec;
    spec.segment_repetitions = 0;
    spec.routes = routes;
    spec.route_repetitions = 10;
    spec.seed = 41;
    const auto library = build_reference_library(world, spec);

    // 50 test drives, cycling through the routes.
    std::vector<std::string> labels;
    for (const auto& [label, r] : routes) {
        labels.push_back(label);
    }
    ReferenceLibrary everything = library;
    std::vector<std::pair<std::string, std::size_t>> tests;  // label, index in everything
    for (std::size_t i = 0; i < 50; ++i) {
        const auto& label = labels[i % labels.size()];
        const auto plan = make_drive_plan(world, routes.at(label), recording_seed(42, label, i));
        everything.routes[label].push_back(simulate_drive(world, plan).trace);
        tests.emplace_back(label, everything.routes[label].size() - 1);
    }

    const PreprocessConfig cfg;
    const auto prepared = prepare_routes(everything, cfg);
    const auto dm = pairwise_distances(prepared);

    // Index of (label, k) in prepared order.
    std::map<std::pair<std::string, std::size_t>, std::size_t> index;
    {
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < prepared.label_index.size(); ++i) {
            const auto& label = prepared.labels[prepared.label_index[i]];
            index[{label, seen[label]++}] = i;
        }
    }
    std::size_t correct = 0;
    for (const auto& [label, k] : tests) {
        const std::size_t q = index.at({label, k});
        double best = oracle::kInf;
        std::string predicted;
        for (const auto& [ref_label, list] : library.routes) {
            for (std::size_t r = 0; r < list.size(); ++r) {
                const double d = dm.at(q, index.at({ref_label, r}));
                if (d < best) {
                    best = d;
                    predicted = ref_label;
                }
            }
        }
        correct += predicted == label ? 1 : 0;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(tests.size());

    const std::size_t refs[] = {1, 2, 5, 10};
    std::vector<double> means;
    for (std::size_t r : refs) {
        double sum = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            sum += cross_validate(dm, r, 1, seed).correct_fraction;
        }
        means.push_back(sum / 20.0);
    }
    const bool trend = std::is_sorted(means.begin(), means.end());
    return {accuracy >= 0.70 && trend,
            fmt("accuracy %.1f%% on %zu drives (random 12.5%%); mean over 20 seeds for "
                "refs 1/2/5/10: %.1f/%.1f/%.1f/%.1f%%",
                100 * accuracy, tests.size(), 100 * means[0], 100 * means[1], 100 * means[2],
                100 * means[3])};
}

// Shared tracking setup: grid13 world, whole-route references of the four
// test routes, and a fresh drive of the chosen route.
struct TrackingSetup {
    World world;
    std::vector<PreparedReference> refs;
    TrackerConfig cfg;
};

TrackingSetup tracking_setup(std::uint64_t world_seed) {
    const auto graph = fixtures::grid13();
    TrackingSetup s{fixtures::make_world(graph, world_seed), {}, TrackerConfig{}};
    LibrarySpec spec;
    spec.segment_repetitions = 0;
    const auto test_routes = fixtures::grid13_test_routes();
    for (std::size_t i = 0; i < test_routes.size(); ++i) {
        spec.routes["T" + std::to_string(i + 1)] = test_routes[i];
    }
    spec.route_repetitions = 2;
    spec.seed = 51;
    s.refs = prepare_tracking_references(build_reference_library(s.world, spec), s.cfg);
    return s;
}

// One call-shaped surge with the world's transient duration and amplitude
// ranges, placed in the middle 60% of the drive.
void add_phone_call(PowerTrace& trace, const World& world, std::uint64_t seed) {
    const auto& noise = world.config().noise;
    Rng rng(seed);
    const double duration = uniform(rng, noise.transient_min_s, noise.transient_max_s);
    const double start = uniform(rng, 0.2, 0.8) * (trace.duration() - duration);
    const double amplitude =
        uniform(rng, noise.transient_min_amplitude, noise.transient_max_amplitude) *
        world.config().power.base_draw_mw;
    inject_transient(trace, start, duration, amplitude);
}

// 5 ---------------------------------------------------------------------------

Outcome tracking() {
    const auto setup = tracking_setup(5005);
    const auto plan = make_drive_plan(setup.world, fixtures::corridor_route(), 5501);
    const auto stream = simulate_drive(setup.world, plan).trace;

    const auto raw = track_raw(stream, setup.refs, setup.cfg);
    const auto plain = score_tracking(stream, raw, setup.cfg);
    const double ticks = static_cast<double>(plain.errors_m.size());
    const bool converged =
        plain.convergence_tick && static_cast<double>(*plain.convergence_tick) <= 0.15 * ticks;
    const bool accurate = converged && plain.fraction_below_bound >= 0.80;

    // Adversarial: another drive of the route with one minute of call-like
    // draw in the middle that no reference contains.
    auto noisy =
        simulate_drive(setup.world, make_drive_plan(setup.world, fixtures::corridor_route(), 5502))
            .trace;
    inject_transient(noisy, noisy.duration() / 2.0, 60.0, 3.0 * setup.world.config().power.base_draw_mw);
    const auto noisy_raw = track_raw(noisy, setup.refs, setup.cfg);
    const auto adv_plain = score_tracking(noisy, noisy_raw, setup.cfg);
    const auto adv_motion =
        score_tracking(noisy, apply_motion_model_series(noisy_raw, setup.cfg), setup.cfg);
    auto below = [](const TrackingRun& run) {
        std::size_t n = 0;
        for (double e : run.errors_m) {
            n += e < run.error_bound_m ? 1 : 0;
        }
        return static_cast<double>(n) / static_cast<double>(run.errors_m.size());
    };
    const double fp = below(adv_plain);
    const double fm = below(adv_motion);
    std::size_t locked = 0;
    for (const auto& est : noisy_raw) {
        locked += est.score > setup.cfg.threshold ? 1 : 0;
    }
    return {accurate && fm >= fp,
            fmt("convergence tick %s of %.0f (limit %.0f); %.1f%% of errors below %.0f m after it; "
                "adversarial below-bound: motion %.1f%% vs plain %.1f%% (score above threshold on "
                "%zu of %zu ticks)",
                plain.convergence_tick ? std::to_string(*plain.convergence_tick).c_str() : "none",
                ticks, 0.15 * ticks, 100 * plain.fraction_below_bound, plain.error_bound_m,
                100 * fm, 100 * fp, locked, noisy_raw.size())};
}

// 6 ---------------------------------------------------------------------------

Outcome osb_robustness() {
    auto setup = tracking_setup(6006);
    const auto route = fixtures::grid13_test_routes()[3];
    std::size_t osb_wins = 0;
    const std::size_t runs = 20;
    for (std::size_t run = 0; run < runs; ++run) {
        auto stream =
            simulate_drive(setup.world, make_drive_plan(setup.world, route, 6100 + run)).trace;
        add_phone_call(stream, setup.world, derive_seed(6200, run));
        auto median_error = [&](Matcher m) {
            auto cfg = setup.cfg;
            cfg.matcher = m;
            auto errors = score_tracking(stream, track_raw(stream, setup.refs, cfg), cfg).errors_m;
            std::sort(errors.begin(), errors.end());
            const auto n = errors.size();
            return n % 2 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
        };
        osb_wins += median_error(Matcher::osb) <= median_error(Matcher::dtw) ? 1 : 0;
    }
    return {2 * osb_wins >= runs,
            fmt("OSB median error <= DTW median error in %zu/%zu runs", osb_wins, runs)};
}

// 7 ---------------------------------------------------------------------------

/// Exact best route by enumeration: every feasible route of `steps` segments
/// from the start, scored with the same greedy per-segment weights the
/// filter uses; the route with the smallest summed cost wins.
Route enumerate_best_route(const PreparedObservation& obs, const HmmModel& model,
                           std::size_t steps) {
    std::vector<Route> routes{Route{{model.start}}};
    for (std::size_t s = 0; s < steps; ++s) {
        std::vector<Route> next;
        for (const auto& r : routes) {
            const IntersectionId prev = r.size() >= 2 ? r.nodes[r.size() - 2] : kNoIntersection;
            for (IntersectionId z : feasible_next(model.graph, prev, r.nodes.back())) {
                Route e = r;
                e.nodes.push_back(z);
                next.push_back(std::move(e));
            }
        }
        routes = std::move(next);
    }
    Route best;
    double best_cost = oracle::kInf;
    for (const auto& r : routes) {
        double t = 0.0;
        double total = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const Triple triple{i == 0 ? kNoIntersection : r.nodes[i - 1], r.nodes[i], r.nodes[i + 1]};
            const auto w = segment_likelihood_weight(obs, t, triple, model);
            if (!w) {
                ok = false;
                break;
            }
            total += w->cost;
            t += w->duration_s;
        }
        if (ok && total < best_cost) {
            best_cost = total;
            best = r;
        }
    }
    return best;
}

Outcome particle_filter_tiny() {
    const auto graph = fixtures::tiny4();
    const auto world = fixtures::make_world(graph, 7007);
    LibrarySpec spec;
    spec.segment_repetitions = 3;
    spec.seed = 71;
    const auto library = build_reference_library(world, spec);
    InferenceConfig cfg;
    const auto model = build_model(graph, library, fixtures::kTiny4Start, cfg, 3);
    const auto truth = Route::parse("1-2-4-3");
    const auto drive = simulate_drive(world, make_drive_plan(world, truth, 7201));
    const auto obs = prepare_observation(drive.trace, cfg);
    const auto best = enumerate_best_route(obs, model, 3);

    std::size_t hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto particles = run_particle_filter(obs, model, 2000, 3, seed);
        const auto routes = routes_of(particles);
        hits += most_frequent_route(routes) == best ? 1 : 0;
    }
    return {hits >= 18, fmt("enumeration optimum %s (truth %s); modal route matches in %zu/20 seeds",
                            best.to_string().c_str(), truth.to_string().c_str(), hits)};
}

// 8 ---------------------------------------------------------------------------

Outcome route_inference_grid() {
    const auto graph = fixtures::grid13();
    const auto world = fixtures::make_world(graph, 8008);
    LibrarySpec spec;
    spec.segment_repetitions = 3;
    spec.seed = 81;
    const auto library = build_reference_library(world, spec);
    InferenceConfig cfg;
    cfg.particles = 300;

    std::vector<Route> truths;
    std::vector<RouteEstimates> estimates;
    std::map<IntersectionId, HmmModel> models;
    const auto test_routes = fixtures::grid13_test_routes();
    for (std::size_t ri = 0; ri < test_routes.size(); ++ri) {
        const auto& full = test_routes[ri];
        const auto drive = simulate_drive(world, make_drive_plan(world, full, 8100 + ri));
        for (std::size_t len = 3; len <= 7; ++len) {
            for (std::size_t begin = 0; begin + len < full.size(); ++begin) {
                Route truth;
                truth.nodes.assign(full.nodes.begin() + static_cast<std::ptrdiff_t>(begin),
                                   full.nodes.begin() + static_cast<std::ptrdiff_t>(begin + len + 1));
                const double p = drive.trace.sample_period;
                const double t0 = static_cast<double>(drive.segment_start[begin]) * p;
                const double t1 = begin + len < drive.segment_start.size()
                                      ? static_cast<double>(drive.segment_start[begin + len]) * p
                                      : drive.trace.duration();
                const auto observation = slice_trace(drive.trace, t0, t1);
                const IntersectionId start = truth.nodes.front();
                if (!models.contains(start)) {
                    models.emplace(start, build_model(graph, library, start, cfg));
                }
                const auto& model = models.at(start);
                const auto obs = prepare_observation(observation, cfg);
                const auto particles = run_particle_filter(
                    obs, model, cfg.particles, std::nullopt,
                    derive_seed(8200, ri, begin * 16 + len));
                estimates.push_back(estimate_pair(particles, graph));
                truths.push_back(std::move(truth));
            }
        }
    }
    const auto baseline = random_route_baseline(graph, truths, 10000, 8300);
    const auto s = summarize_route_inference(estimates, truths, baseline);
    const bool pass = truths.size() >= 100 &&
                      s.combined.destination_rate >= 2.0 * s.random.destination_rate &&
                      s.combined.mean_normalized_distance < s.random.mean_normalized_distance;
    return {pass,
            fmt("%zu sub-tracks; destination combined %.1f%% (frequent %.1f%%, imv %.1f%%) vs "
                "random %.1f%%; normalized Levenshtein combined %.3f vs random %.3f",
                truths.size(), 100 * s.combined.destination_rate, 100 * s.frequent.destination_rate,
                100 * s.imv.destination_rate, 100 * s.random.destination_rate,
                s.combined.mean_normalized_distance, s.random.mean_normalized_distance)};
}

// 9 ---------------------------------------------------------------------------

Outcome metric_properties() {
    Rng rng(909);
    auto random_route = [&] {
        Route r;
        const std::size_t n = 1 + uniform_index(rng, 7);
        for (std::size_t i = 0; i < n; ++i) {
            r.nodes.push_back(static_cast<IntersectionId>(1 + uniform_index(rng, 5)));
        }
        return r;
    };
    std::size_t matched = 0;
    std::size_t properties_ok = 0;
    const std::size_t cases = 500;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto a = random_route();
        const auto b = random_route();
        const auto x = random_route();
        const auto ab = levenshtein_routes(a, b);
        const auto ba = levenshtein_routes(b, a);
        const auto ax = levenshtein_routes(a, x);
        const auto xb = levenshtein_routes(x, b);
        matched += ab.raw == oracle::levenshtein_scripts(a.nodes, b.nodes) ? 1 : 0;
        const bool ok = ab.raw == ba.raw && ab.normalized == ba.normalized &&
                        ab.raw <= ax.raw + xb.raw && ab.normalized >= 0.0 &&
                        ab.normalized <= 1.0 && ((ab.raw == 0) == (a == b));
        properties_ok += ok ? 1 : 0;
    }
    return {matched == cases && properties_ok == cases,
            fmt("%zu/%zu match the edit-script oracle; properties hold on %zu/%zu", matched, cases,
                properties_ok, cases)};
}

// Every subcommand, chained the way a user would run them. Paths are
// relative to the run directory.
std::vector<std::string> cli_pipeline(const std::string& corridor) {
    return {
        "gen world --fixture grid13",
        "gen library --world world.json --routes routes8 --no-segments",
        "gen drive --world world.json --route 8-7-1-2-3-4 --seed 21",
        "preprocess --trace drive.csv",
        "dist drive.csv library/routes/A/000.csv --method subsequence",
        "dist drive.csv library/routes/A/000.csv --method osb --osb-mode subsequence",
        "classify --library library --trace drive.csv",
        "xval --library library --iterations 5",
        "--config one_take.json gen library --world world.json --route corr=" + corridor +
            " --no-segments",
        "gen drive --world world.json --route " + corridor + " --seed 22",
        "track --library library --stream drive.csv --matcher osb --motion",
        "gen world --fixture tiny4",
        "gen library --world world.json",
        "gen drive --world world.json --route 1-2-4-3 --seed 23",
        "infer --observation drive.csv --world world.json --library library --start 1 "
        "--particles 400 --truth 1-2-4-3",
        "report track_report.json infer_report.json",
    };
}

// Runs the pipeline in `dir`. Step k writes into out_k/; its files are then
// copied up into `dir`, where later steps read them.
bool run_pipeline(const std::string& cli, const std::filesystem::path& dir, unsigned jobs,
                  std::string& failure) {
    namespace fs = std::filesystem;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "one_take.json") << R"({"synthworld": {"route_repetitions": 1}})" << '\n';
    const auto steps = cli_pipeline(fixtures::corridor_route().to_string());
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const std::string out = "out_" + std::to_string(k);
        const std::string command = "cd '" + dir.string() + "' && '" + cli + "' --jobs " +
                                    std::to_string(jobs) + " --out " + out + " " + steps[k] +
                                    " > stdout_" + std::to_string(k) + ".txt 2> /dev/null";
        if (std::system(command.c_str()) != 0) {
            failure = "step failed: " + steps[k];
            return false;
        }
        for (const auto& entry : fs::directory_iterator(dir / out)) {
            const auto target = dir / entry.path().filename();
            fs::remove_all(target);
            fs::copy(entry.path(), target, fs::copy_options::recursive);
        }
    }
    return true;
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        files[fs::relative(entry.path(), dir).string()] = text.str();
    }
    return files;
}

Outcome check_determinism(const std::string& cli) {
    namespace fs = std::filesystem;
    if (cli.empty()) {
        return {false, "no --cli given"};
    }
    const fs::path root = fs::temp_directory_path() / ("powerloc_determinism_" + std::to_string(::getpid()));
    const std::vector<std::pair<std::string, unsigned>> runs{{"a", 1}, {"b", 1}, {"c", 4}};
    std::vector<std::map<std::string, std::string>> outputs;
    for (const auto& [name, jobs] : runs) {
        std::string failure;
        if (!run_pipeline(cli, root / name, jobs, failure)) {
            fs::remove_all(root);
            return {false, failure};
        }
        outputs.push_back(snapshot(root / name));
    }
    fs::remove_all(root);

    auto differing = [](const auto& x, const auto& y) {
        std::size_t n = x.size() == y.size() ? 0 : 1;
        for (const auto& [path, text] : x) {
            const auto it = y.find(path);
            n += (it == y.end() || it->second != text) ? 1 : 0;
        }
        return n;
    };
    const std::size_t repeat_diff = differing(outputs[0], outputs[1]);
    const std::size_t jobs_diff = differing(outputs[0], outputs[2]);
    const auto steps = cli_pipeline(fixtures::corridor_route().to_string()).size();
    return {repeat_diff == 0 && jobs_diff == 0,
            fmt("%zu subcommand runs, %zu files; repeat run: %zu differ; --jobs 1 vs 4: %zu differ",
                steps, outputs[0].size(), repeat_diff, jobs_diff)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else {
            selected.insert(std::atoi(arg.c_str()));
        }
    }
    const std::vector<Criterion> criteria{
        {1, "DTW oracle equivalence", 10, dtw_oracle},
        {2, "subsequence DTW equivalence", 30, subsequence_oracle},
        {3, "OSB equivalence", 60, osb_oracle},
        {4, "route distinguishability", 180, route_distinguishability},
        {5, "tracking", 120, tracking},
        {6, "OSB tracking robustness", 180, osb_robustness},
        {7, "particle-filter correctness", 60, particle_filter_tiny},
        {8, "route inference at grid scale", 600, route_inference_grid},
        {9, "metric properties", 10, metric_properties},
        {10, "determinism", 120, [&] { return check_determinism(cli); }},
    };
    bool all = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) {
            continue;
        }
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        const bool pass = out.pass && secs < c.limit_s;
        all = all && pass;
        std::printf("criterion %2d %s: %s -- %s [%.1f s, limit %.0f s]\n", c.id,
                    pass ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs, c.limit_s);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
