#pragma once

#include "powerloc/preprocess.hpp"
#include "powerloc/types.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace powerloc {

struct ClassificationResult {
    std::string predicted_label;
    std::map<std::string, double> per_label_scores;  // min normalized DTW per label
    double margin = 0.0;                             // runner-up minus winner
};

/// Route references with the preprocessing already applied.
struct PreparedRoutes {
    std::vector<std::string> labels;              // sorted, unique
    std::vector<std::vector<double>> series;      // one per reference
    std::vector<std::size_t> label_index;         // series -> labels
};

[[nodiscard]] PreparedRoutes prepare_routes(const ReferenceLibrary& library,
                                            const PreprocessConfig& cfg, unsigned jobs = 1);

/// 1-NN over normalized DTW: the label of the closest reference wins; equal
/// scores resolve to the lexicographically smallest label.
[[nodiscard]] ClassificationResult classify_route(const PowerTrace& query,
                                                  const ReferenceLibrary& library,
                                                  const PreprocessConfig& cfg, unsigned jobs = 1);
[[nodiscard]] ClassificationResult classify_prepared(std::span<const double> query,
                                                     const PreparedRoutes& refs,
                                                     unsigned jobs = 1);

/// Normalized DTW between every pair of route references. Splits in
/// cross-validation only select rows and columns, so this is computed once.
struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::size_t> label_index;
    std::vector<double> values;  // row-major, size() x size()

    [[nodiscard]] std::size_t size() const { return label_index.size(); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

[[nodiscard]] DistanceMatrix pairwise_distances(const PreparedRoutes& refs, unsigned jobs = 1);

/// One row of the identification-rate table.
struct CrossValidationRow {
    std::size_t unique_routes = 0;
    std::size_t refs_per_route = 0;
    std::size_t test_routes = 0;            // test items per iteration
    double correct_fraction = 0.0;          // averaged over iterations
    double random_guess_fraction = 0.0;     // 1 / unique_routes
    std::size_t iterations = 0;
};

/// Each iteration draws refs_per_route training references per route
/// uniformly without replacement; every remaining reference is a test item.
/// One seed drives the whole run.
[[nodiscard]] CrossValidationRow cross_validate(const DistanceMatrix& distances,
                                                std::size_t refs_per_route,
                                                std::size_t iterations, std::uint64_t seed);
[[nodiscard]] CrossValidationRow cross_validate(const ReferenceLibrary& library,
                                                std::size_t refs_per_route,
                                                std::size_t iterations, std::uint64_t seed,
                                                const PreprocessConfig& cfg, unsigned jobs = 1);

[[nodiscard]] std::string xval_csv_header();
[[nodiscard]] std::string xval_csv_row(const CrossValidationRow& row);

}  // namespace powerloc
