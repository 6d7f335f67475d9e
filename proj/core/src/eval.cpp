#include "powerloc/eval.hpp"

#include "powerloc/geo.hpp"
#include "powerloc/hmm.hpp"
#include "powerloc/io.hpp"
#include "powerloc/rng.hpp"
#include "powerloc/tracker.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace powerloc {

EditDistance levenshtein_routes(const Route& a, const Route& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("levenshtein_routes: routes must be non-empty");
    }
    const auto& x = a.nodes;
    const auto& y = b.nodes;
    std::vector<std::size_t> prev(y.size() + 1);
    std::vector<std::size_t> cur(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= x.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    EditDistance out;
    out.raw = prev[y.size()];
    out.normalized =
        static_cast<double>(out.raw) / static_cast<double>(std::max(x.size(), y.size()));
    return out;
}

bool destination_hit(const Route& estimate, const Route& truth) {
    if (estimate.size() < 2 || truth.size() < 2) {
        return false;
    }
    const auto& e = estimate.nodes;
    const auto& t = truth.nodes;
    return e[e.size() - 2] == t[t.size() - 2] && e.back() == t.back();
}

bool exact_fit(const Route& estimate, const Route& truth) { return estimate == truth; }

Route random_feasible_route(const RoadGraph& graph, IntersectionId start, std::size_t segments,
                            std::uint64_t seed) {
    Rng rng(seed);
    Route route{{start}};
    IntersectionId prev = kNoIntersection;
    for (std::size_t i = 0; i < segments; ++i) {
        const auto next = feasible_next(graph, prev, route.nodes.back());
        if (next.empty()) {
            break;
        }
        prev = route.nodes.back();
        route.nodes.push_back(next[uniform_index(rng, next.size())]);
    }
    return route;
}

DecoderScores random_route_baseline(const RoadGraph& graph, IntersectionId start,
                                    std::size_t length, std::span<const Route> truths,
                                    std::size_t trials, std::uint64_t seed) {
    if (length < 1 || trials < 1 || truths.empty()) {
        throw std::invalid_argument("random_route_baseline: length, trials and truths must be >= 1");
    }
    DecoderScores s;
    for (std::size_t k = 0; k < trials; ++k) {
        const auto guess = random_feasible_route(graph, start, length, derive_seed(seed, k));
        for (const auto& truth : truths) {
            s.destination_rate += destination_hit(guess, truth) ? 1.0 : 0.0;
            s.mean_normalized_distance += levenshtein_routes(guess, truth).normalized;
            s.exact_fit_rate += exact_fit(guess, truth) ? 1.0 : 0.0;
        }
    }
    const double n = static_cast<double>(trials * truths.size());
    s.destination_rate /= n;
    s.mean_normalized_distance /= n;
    s.exact_fit_rate /= n;
    return s;
}

DecoderScores random_route_baseline(const RoadGraph& graph, std::span<const Route> truths,
                                    std::size_t trials, std::uint64_t seed) {
    if (truths.empty()) {
        throw std::invalid_argument("random_route_baseline: no truths");
    }
    DecoderScores total;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const auto& truth = truths[i];
        const auto s = random_route_baseline(graph, truth.nodes.front(), truth.segment_count(),
                                             std::span(&truth, 1), trials, derive_seed(seed, i));
        total.destination_rate += s.destination_rate;
        total.mean_normalized_distance += s.mean_normalized_distance;
        total.exact_fit_rate += s.exact_fit_rate;
    }
    const auto n = static_cast<double>(truths.size());
    total.destination_rate /= n;
    total.mean_normalized_distance /= n;
    total.exact_fit_rate /= n;
    return total;
}

const MetricRow* EvalReport::find(const std::string& name) const {
    for (const auto& row : rows) {
        if (row.name == name) {
            return &row;
        }
    }
    return nullptr;
}

EvalReport tracking_error_report(std::span<const LatLon> estimates, std::span<const LatLon> truth,
                                 std::span<const double> times_s, double bound_m,
                                 std::size_t dwell, std::string scenario) {
    if (estimates.size() != truth.size() || estimates.size() != times_s.size()) {
        throw std::invalid_argument("tracking_error_report: series lengths differ");
    }
    if (estimates.empty()) {
        throw std::invalid_argument("tracking_error_report: empty series");
    }
    EvalReport report;
    report.scenario = std::move(scenario);
    std::vector<double> errors;
    errors.reserve(estimates.size());
    auto& over_time = report.series["error_vs_time"];
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        errors.push_back(haversine_distance(estimates[k], truth[k]));
        over_time.emplace_back(times_s[k], errors.back());
    }
    const auto n = errors.size();
    std::size_t below = 0;
    for (double e : errors) {
        below += e < bound_m ? 1 : 0;
    }
    auto sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    auto& cdf = report.series["error_cdf"];
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < n && sorted[k + 1] == sorted[k]) {
            continue;
        }
        cdf.emplace_back(sorted[k], static_cast<double>(k + 1) / static_cast<double>(n));
    }
    double sum = 0.0;
    for (double e : errors) {
        sum += e;
    }
    const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    report.rows.push_back({"fraction_below_bound", static_cast<double>(below) / static_cast<double>(n),
                           std::nullopt, n});
    report.rows.push_back({"error_bound_m", bound_m, std::nullopt, n});
    report.rows.push_back({"mean_error_m", sum / static_cast<double>(n), std::nullopt, n});
    report.rows.push_back({"median_error_m", median, std::nullopt, n});
    const auto conv = convergence_tick(errors, bound_m, dwell);
    if (conv) {
        std::size_t after = 0;
        for (std::size_t k = *conv; k < n; ++k) {
            after += errors[k] < bound_m ? 1 : 0;
        }
        report.rows.push_back({"convergence_tick", static_cast<double>(*conv), std::nullopt, n});
        report.rows.push_back({"convergence_time_s", times_s[*conv], std::nullopt, n});
        report.rows.push_back({"fraction_below_bound_after_convergence",
                               static_cast<double>(after) / static_cast<double>(n - *conv),
                               std::nullopt, n - *conv});
    }
    return report;
}

namespace {

struct Tally {
    double hits = 0.0;
    double distance = 0.0;
    double exact = 0.0;

    [[nodiscard]] DecoderScores scores(std::size_t n) const {
        const auto d = static_cast<double>(n);
        return {hits / d, distance / d, exact / d};
    }
};

}  // namespace

RouteInferenceSummary summarize_route_inference(std::span<const RouteEstimates> estimates,
                                                std::span<const Route> truths,
                                                const DecoderScores& random_baseline) {
    if (estimates.empty() || estimates.size() != truths.size()) {
        throw std::invalid_argument(
            "route_inference_report: need one estimate pair per truth, at least one");
    }
    Tally frequent;
    Tally imv;
    Tally combined;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const auto& t = truths[i];
        const auto& e = estimates[i];
        const bool fh = destination_hit(e.frequent, t);
        const bool ih = destination_hit(e.imv, t);
        const double fd = levenshtein_routes(e.frequent, t).normalized;
        const double id = levenshtein_routes(e.imv, t).normalized;
        const bool fx = exact_fit(e.frequent, t);
        const bool ix = exact_fit(e.imv, t);
        frequent.hits += fh ? 1.0 : 0.0;
        frequent.distance += fd;
        frequent.exact += fx ? 1.0 : 0.0;
        imv.hits += ih ? 1.0 : 0.0;
        imv.distance += id;
        imv.exact += ix ? 1.0 : 0.0;
        combined.hits += (fh || ih) ? 1.0 : 0.0;
        combined.distance += std::min(fd, id);
        combined.exact += (fx || ix) ? 1.0 : 0.0;
    }
    RouteInferenceSummary s;
    s.n = truths.size();
    s.random = random_baseline;
    s.frequent = frequent.scores(s.n);
    s.imv = imv.scores(s.n);
    s.combined = combined.scores(s.n);
    return s;
}

EvalReport route_inference_report(std::span<const RouteEstimates> estimates,
                                  std::span<const Route> truths, const DecoderScores& random_baseline,
                                  std::string scenario) {
    const auto s = summarize_route_inference(estimates, truths, random_baseline);
    EvalReport report;
    report.scenario = std::move(scenario);
    const std::pair<const char*, const DecoderScores*> decoders[] = {
        {"random", &s.random}, {"frequent", &s.frequent}, {"imv", &s.imv}, {"combined", &s.combined}};
    for (const auto& [name, d] : decoders) {
        const std::string prefix = name;
        const bool is_random = prefix == "random";
        auto base = [&](double v) { return is_random ? std::nullopt : std::optional<double>(v); };
        report.rows.push_back({prefix + ".destination_rate", d->destination_rate,
                               base(s.random.destination_rate), s.n});
        report.rows.push_back({prefix + ".mean_normalized_levenshtein", d->mean_normalized_distance,
                               base(s.random.mean_normalized_distance), s.n});
        report.rows.push_back(
            {prefix + ".exact_fit_rate", d->exact_fit_rate, base(s.random.exact_fit_rate), s.n});
    }
    return report;
}

std::string route_inference_table_csv(const RouteInferenceSummary& s) {
    using io::format_double;
    std::string out = "metric,random,frequent,imv,combined\n";
    auto row = [&](const char* name, double DecoderScores::*field) {
        out += std::string(name) + "," + format_double(s.random.*field) + "," +
               format_double(s.frequent.*field) + "," + format_double(s.imv.*field) + "," +
               format_double(s.combined.*field) + "\n";
    };
    row("destination_rate", &DecoderScores::destination_rate);
    row("mean_normalized_levenshtein", &DecoderScores::mean_normalized_distance);
    row("exact_fit_rate", &DecoderScores::exact_fit_rate);
    return out;
}

std::string report_csv(const EvalReport& report, bool header) {
    std::string out = header ? "scenario,metric,value,baseline,n\n" : "";
    for (const auto& row : report.rows) {
        out += report.scenario + "," + row.name + "," + io::format_double(row.value) + "," +
               (row.baseline ? io::format_double(*row.baseline) : "") + "," +
               std::to_string(row.n) + "\n";
    }
    return out;
}

std::string report_json(const EvalReport& report) {
    detail::json doc;
    doc["scenario"] = report.scenario;
    doc["rows"] = detail::json::array();
    for (const auto& row : report.rows) {
        detail::json r;
        r["name"] = row.name;
        r["value"] = row.value;
        r["baseline"] = row.baseline ? detail::json(*row.baseline) : detail::json(nullptr);
        r["n"] = row.n;
        doc["rows"].push_back(std::move(r));
    }
    doc["series"] = detail::json::object();
    for (const auto& [name, points] : report.series) {
        auto arr = detail::json::array();
        for (const auto& [x, y] : points) {
            arr.push_back({x, y});
        }
        doc["series"][name] = std::move(arr);
    }
    return doc.dump(1) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw FormatError(std::string("report: invalid JSON: ") + e.what());
    }
    EvalReport report;
    detail::ObjectReader reader(doc, "report");
    report.scenario = reader.require<std::string>("scenario");
    const auto* rows = reader.child("rows");
    const auto* series = reader.child("series");
    reader.finish();
    if (!rows || !rows->is_array()) {
        throw FormatError("report: 'rows' must be an array");
    }
    for (const auto& r : *rows) {
        detail::ObjectReader row_reader(r, "report.rows[]");
        MetricRow row;
        row.name = row_reader.require<std::string>("name");
        row.value = row_reader.require<double>("value");
        row_reader.get_optional("baseline", row.baseline);
        row.n = row_reader.require<std::size_t>("n");
        row_reader.finish();
        report.rows.push_back(std::move(row));
    }
    if (series) {
        if (!series->is_object()) {
            throw FormatError("report: 'series' must be an object");
        }
        try {
            for (const auto& [name, points] : series->items()) {
                auto& out = report.series[name];
                for (const auto& p : points) {
                    out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
                }
            }
        } catch (const detail::json::exception& e) {
            throw FormatError(std::string("report: bad series: ") + e.what());
        }
    }
    return report;
}

}  // namespace powerloc
