#include "oracles.hpp"

#include <powerloc/rng.hpp>
#include <powerloc/similarity.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace powerloc;

namespace {

std::vector<double> ints(Rng& rng, std::size_t lo_len, std::size_t hi_len) {
    const std::size_t n = lo_len + uniform_index(rng, hi_len - lo_len + 1);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = static_cast<double>(uniform_index(rng, 10));
    }
    return out;
}

double brute_jump_cost(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (double x : a) {
        for (double y : b) {
            sum += std::abs(x - y);
        }
    }
    const double n = static_cast<double>(a.size() * b.size());
    const double mean = sum / n;
    double var = 0.0;
    for (double x : a) {
        for (double y : b) {
            var += (std::abs(x - y) - mean) * (std::abs(x - y) - mean);
        }
    }
    return mean + std::sqrt(var / n);
}

}  // namespace

TEST(Dtw, MatchesRecursiveOracle) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto a = ints(rng, 1, 6);
        const auto b = ints(rng, 1, 6);
        const auto best = oracle::dtw_paths(a, b);
        const auto got = dtw_distance(a, b);
        EXPECT_EQ(got.distance, oracle::dtw(a, b));
        EXPECT_EQ(got.distance, best.cost);
        EXPECT_EQ(got.path.size(), best.longest);
        EXPECT_DOUBLE_EQ(got.normalized_distance(), best.cost / static_cast<double>(best.longest));
    }
}

TEST(Dtw, PathIsMonotoneAndReplaysItsCost) {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const auto a = ints(rng, 1, 8);
        const auto b = ints(rng, 1, 8);
        const auto al = dtw_distance(a, b);
        ASSERT_FALSE(al.path.empty());
        EXPECT_EQ(al.path.front(), (IndexPair{0, 0}));
        EXPECT_EQ(al.path.back(), (IndexPair{a.size() - 1, b.size() - 1}));
        for (std::size_t k = 1; k < al.path.size(); ++k) {
            const auto dq = al.path[k].query - al.path[k - 1].query;
            const auto dt = al.path[k].target - al.path[k - 1].target;
            EXPECT_TRUE(dq <= 1 && dt <= 1 && dq + dt >= 1);
        }
        EXPECT_DOUBLE_EQ(replay_cost(al, a, b), al.distance);
    }
}

TEST(Dtw, SummaryAgreesWithFullAlignment) {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const auto a = ints(rng, 1, 10);
        const auto b = ints(rng, 1, 10);
        const auto full = dtw_distance(a, b);
        const auto summary = dtw_summary(a, b);
        EXPECT_EQ(summary.distance, full.distance);
        EXPECT_EQ(summary.steps, full.steps());
        EXPECT_DOUBLE_EQ(normalized_dtw(a, b), full.normalized_distance());
    }
}

TEST(Dtw, IdenticalSequencesCostNothing) {
    const std::vector<double> a{3, 1, 4, 1, 5};
    EXPECT_EQ(dtw_distance(a, a).distance, 0.0);
    EXPECT_EQ(dtw_distance(a, a).path.size(), 5u);
}

TEST(SubsequenceDtw, MatchesAllWindowsOracle) {
    Rng rng(21);
    for (int i = 0; i < 150; ++i) {
        const auto q = ints(rng, 1, 4);
        const auto t = ints(rng, 1, 9);
        const auto want = oracle::subsequence_all_windows(q, t);
        const auto got = subsequence_dtw(q, t);
        EXPECT_EQ(got.distance, want.cost);
        EXPECT_EQ(got.start_offset, want.start);
        EXPECT_EQ(got.end_offset, want.end);
        const auto summary = subsequence_dtw_summary(q, t);
        EXPECT_EQ(summary.distance, want.cost);
        EXPECT_EQ(summary.start_offset, want.start);
        EXPECT_EQ(summary.end_offset, want.end);
    }
}

TEST(SubsequenceDtw, FindsExactEmbedding) {
    const std::vector<double> target{9, 9, 1, 7, 3, 9, 9};
    const std::vector<double> query{1, 7, 3};
    const auto got = subsequence_dtw(query, target);
    EXPECT_EQ(got.distance, 0.0);
    EXPECT_EQ(got.start_offset, 2u);
    EXPECT_EQ(got.end_offset, 4u);
}

TEST(SubsequenceDtw, EarliestWindowWinsTies) {
    const std::vector<double> target{5, 2, 5, 2};
    const std::vector<double> query{5, 2};
    const auto got = subsequence_dtw(query, target);
    EXPECT_EQ(got.distance, 0.0);
    EXPECT_EQ(got.start_offset, 0u);
    EXPECT_EQ(got.end_offset, 1u);
}

TEST(Osb, MatchesBijectionOracleInBothModes) {
    Rng rng(31);
    for (int i = 0; i < 60; ++i) {
        const auto q = ints(rng, 1, 5);
        const auto t = ints(rng, 1, 5);
        for (double jump : {0.5, 2.0, 7.0}) {
            EXPECT_DOUBLE_EQ(osb(q, t, jump).distance, oracle::osb_bijections(q, t, jump, false));
            EXPECT_DOUBLE_EQ(osb(q, t, jump, OsbMode::subsequence).distance,
                             oracle::osb_bijections(q, t, jump, true));
            EXPECT_DOUBLE_EQ(osb_summary(q, t, jump).distance, osb(q, t, jump).distance);
        }
    }
}

TEST(Osb, AlignmentIsABijectionThatReplays) {
    Rng rng(32);
    for (int i = 0; i < 60; ++i) {
        const auto q = ints(rng, 1, 7);
        const auto t = ints(rng, 1, 7);
        const auto al = osb(q, t, 1.5);
        ASSERT_FALSE(al.path.empty());
        for (std::size_t k = 1; k < al.path.size(); ++k) {
            EXPECT_GT(al.path[k].query, al.path[k - 1].query);
            EXPECT_GT(al.path[k].target, al.path[k - 1].target);
        }
        EXPECT_EQ(al.path.size() + al.skipped_query.size(), q.size());
        EXPECT_EQ(al.path.size() + al.skipped_target.size(), t.size());
        EXPECT_DOUBLE_EQ(replay_cost(al, q, t), al.distance);
    }
}

TEST(Osb, SkipsAnOutlierInsteadOfWarping) {
    const std::vector<double> q{1, 2, 100, 3, 4};
    const std::vector<double> t{1, 2, 3, 4};
    const auto al = osb(q, t, 1.0);
    EXPECT_EQ(al.distance, 1.0);
    EXPECT_EQ(al.skipped_query, std::vector<std::size_t>{2});
    EXPECT_TRUE(al.skipped_target.empty());
}

TEST(Osb, AlwaysMatchesAtLeastOnePair) {
    const std::vector<double> q{0, 0};
    const std::vector<double> t{50, 50};
    const auto al = osb(q, t, 0.0);
    EXPECT_EQ(al.path.size(), 1u);
    EXPECT_EQ(al.distance, 50.0);
}

TEST(Osb, DefaultJumpCostIsMeanPlusStdOfAllPairs) {
    Rng rng(33);
    for (int i = 0; i < 30; ++i) {
        const auto a = ints(rng, 1, 8);
        const auto b = ints(rng, 1, 8);
        EXPECT_NEAR(default_jump_cost(a, b), brute_jump_cost(a, b), 1e-9);
    }
}
