#include "powerloc/classifier.hpp"

#include "powerloc/io.hpp"
#include "powerloc/parallel.hpp"
#include "powerloc/rng.hpp"
#include "powerloc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace powerloc {

PreparedRoutes prepare_routes(const ReferenceLibrary& library, const PreprocessConfig& cfg,
                              unsigned jobs) {
    PreparedRoutes out;
    std::vector<const PowerTrace*> traces;
    for (const auto& [label, list] : library.routes) {
        out.labels.push_back(label);
        for (const auto& trace : list) {
            traces.push_back(&trace);
            out.label_index.push_back(out.labels.size() - 1);
        }
    }
    out.series.resize(traces.size());
    parallel_for(traces.size(), jobs,
                 [&](std::size_t i) { out.series[i] = preprocess(*traces[i], cfg).samples; });
    return out;
}

ClassificationResult classify_prepared(std::span<const double> query, const PreparedRoutes& refs,
                                       unsigned jobs) {
    if (refs.series.empty()) {
        throw std::invalid_argument("classify_route: empty library");
    }
    std::vector<double> dist(refs.series.size());
    parallel_for(refs.series.size(), jobs,
                 [&](std::size_t i) { dist[i] = normalized_dtw(query, refs.series[i]); });

    std::vector<double> per_label(refs.labels.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        auto& slot = per_label[refs.label_index[i]];
        slot = std::min(slot, dist[i]);
    }
    ClassificationResult result;
    std::size_t winner = 0;
    for (std::size_t l = 0; l < per_label.size(); ++l) {
        result.per_label_scores[refs.labels[l]] = per_label[l];
        if (per_label[l] < per_label[winner]) {
            winner = l;
        }
    }
    result.predicted_label = refs.labels[winner];
    double runner_up = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < per_label.size(); ++l) {
        if (l != winner) {
            runner_up = std::min(runner_up, per_label[l]);
        }
    }
    result.margin = std::isfinite(runner_up) ? runner_up - per_label[winner] : 0.0;
    return result;
}

ClassificationResult classify_route(const PowerTrace& query, const ReferenceLibrary& library,
                                    const PreprocessConfig& cfg, unsigned jobs) {
    if (library.routes.empty()) {
        throw std::invalid_argument("classify_route: empty library");
    }
    if (query.samples.size() < 2) {
        throw std::invalid_argument("classify_route: query shorter than two samples");
    }
    const auto refs = prepare_routes(library, cfg, jobs);
    const auto q = preprocess(query, cfg);
    return classify_prepared(q.samples, refs, jobs);
}

DistanceMatrix pairwise_distances(const PreparedRoutes& refs, unsigned jobs) {
    DistanceMatrix out;
    out.labels = refs.labels;
    out.label_index = refs.label_index;
    const std::size_t n = refs.series.size();
    out.values.assign(n * n, 0.0);
    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.values[i * n + j] = normalized_dtw(refs.series[i], refs.series[j]);
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            out.values[i * n + j] = out.values[j * n + i];
        }
    }
    return out;
}

CrossValidationRow cross_validate(const DistanceMatrix& distances, std::size_t refs_per_route,
                                  std::size_t iterations, std::uint64_t seed) {
    if (refs_per_route < 1 || iterations < 1) {
        throw std::invalid_argument("cross_validate: refs_per_route and iterations must be >= 1");
    }
    const std::size_t classes = distances.labels.size();
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < distances.size(); ++i) {
        members[distances.label_index[i]].push_back(i);
    }
    for (std::size_t c = 0; c < classes; ++c) {
        if (members[c].size() <= refs_per_route) {
            throw std::invalid_argument("cross_validate: route '" + distances.labels[c] +
                                        "' needs more than " + std::to_string(refs_per_route) +
                                        " profiles");
        }
    }

    Rng rng(seed);
    CrossValidationRow row;
    row.unique_routes = classes;
    row.refs_per_route = refs_per_route;
    row.iterations = iterations;
    row.random_guess_fraction = 1.0 / static_cast<double>(classes);
    double accuracy_sum = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (auto list : members) {
            shuffle(list, rng);
            train.insert(train.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(refs_per_route));
            test.insert(test.end(), list.begin() + static_cast<std::ptrdiff_t>(refs_per_route), list.end());
        }
        std::size_t correct = 0;
        for (std::size_t q : test) {
            std::vector<double> per_label(classes, std::numeric_limits<double>::infinity());
            for (std::size_t r : train) {
                auto& slot = per_label[distances.label_index[r]];
                slot = std::min(slot, distances.at(q, r));
            }
            const auto winner = static_cast<std::size_t>(
                std::min_element(per_label.begin(), per_label.end()) - per_label.begin());
            if (winner == distances.label_index[q]) {
                ++correct;
            }
        }
        row.test_routes = test.size();
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(test.size());
    }
    row.correct_fraction = accuracy_sum / static_cast<double>(iterations);
    return row;
}

CrossValidationRow cross_validate(const ReferenceLibrary& library, std::size_t refs_per_route,
                                  std::size_t iterations, std::uint64_t seed,
                                  const PreprocessConfig& cfg, unsigned jobs) {
    const auto refs = prepare_routes(library, cfg, jobs);
    return cross_validate(pairwise_distances(refs, jobs), refs_per_route, iterations, seed);
}

std::string xval_csv_header() {
    return "unique_routes,refs_per_route,test_routes,correct_identification_pct,random_guess_pct,"
           "iterations";
}

std::string xval_csv_row(const CrossValidationRow& row) {
    return std::to_string(row.unique_routes) + "," + std::to_string(row.refs_per_route) + "," +
           std::to_string(row.test_routes) + "," + io::format_double(100.0 * row.correct_fraction) +
           "," + io::format_double(100.0 * row.random_guess_fraction) + "," +
           std::to_string(row.iterations);
}

}  // namespace powerloc
