#include <powerloc/geo.hpp>
#include <powerloc/rng.hpp>
#include <powerloc/tracker.hpp>

#include <gtest/gtest.h>

#include <limits>

using namespace powerloc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PowerTrace walk(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PowerTrace t;
    t.sample_period = 1.0;
    t.ground_truth.emplace();
    double v = 500.0;
    for (std::size_t i = 0; i < n; ++i) {
        v += uniform(rng, 1.0, 50.0);  // strictly increasing, so every prefix embeds once
        t.samples.push_back(v);
        t.ground_truth->push_back({47.37 + 1e-4 * static_cast<double>(i), 8.54});
    }
    return t;
}

TrackerConfig exact_config(Matcher matcher) {
    TrackerConfig cfg;
    cfg.preprocess = {.ma_window_s = 0.0, .downsample_factor = 1, .znormalize = false};
    cfg.matcher = matcher;
    return cfg;
}

TrackingEstimate at(double t, double lat, double score) {
    TrackingEstimate e;
    e.t_s = t;
    e.position = {lat, 8.54};
    e.score = score;
    return e;
}

}  // namespace

TEST(Tracker, ScoreIsInverseOfOnePlusDistance) {
    EXPECT_EQ(similarity_score(0.0), 1.0);
    EXPECT_DOUBLE_EQ(similarity_score(1.0), 0.5);
    EXPECT_DOUBLE_EQ(similarity_score(3.0), 0.25);
}

TEST(Tracker, DefaultMaxDisplacement) {
    TrackerConfig cfg;
    EXPECT_DOUBLE_EQ(cfg.effective_max_disp(), 1.5 * 3.0 * 35.0);
    cfg.max_disp_m = 10.0;
    EXPECT_EQ(cfg.effective_max_disp(), 10.0);
}

TEST(Tracker, ExactPrefixOfAReferenceIsLocatedExactly) {
    ReferenceLibrary lib;
    lib.routes["decoy"] = {walk(90, 2)};
    lib.routes["route"] = {walk(90, 1)};
    const auto stream = lib.routes["route"][0];
    for (Matcher m : {Matcher::dtw, Matcher::osb}) {
        const auto cfg = exact_config(m);
        const auto refs = prepare_tracking_references(lib, cfg);
        const auto estimates = track_raw(stream, refs, cfg);
        ASSERT_EQ(estimates.size(), 30u);
        for (std::size_t k = 0; k < estimates.size(); ++k) {
            EXPECT_EQ(estimates[k].route_label, "route");
            EXPECT_EQ(estimates[k].end_offset, tick_sample_count(stream, 3.0, k) - 1);
            EXPECT_EQ(estimates[k].score, 1.0);
        }
        const auto run = score_tracking(stream, estimates, cfg);
        for (double e : run.errors_m) {
            EXPECT_EQ(e, 0.0);
        }
        ASSERT_TRUE(run.convergence_tick);
        EXPECT_EQ(*run.convergence_tick, 0u);
        EXPECT_EQ(run.fraction_below_bound, 1.0);
    }
}

TEST(Tracker, EstimateOnlySeesThePrefix) {
    ReferenceLibrary lib;
    lib.routes["route"] = {walk(60, 3)};
    const auto cfg = exact_config(Matcher::dtw);
    const auto refs = prepare_tracking_references(lib, cfg);
    auto prefix = lib.routes["route"][0];
    prefix.samples.resize(20);
    prefix.ground_truth->resize(20);
    const auto e = estimate_location(prefix, refs, cfg);
    EXPECT_EQ(e.end_offset, 19u);
    EXPECT_EQ(e.position, (*lib.routes["route"][0].ground_truth)[19]);
}

TEST(MotionModel, VetoesLargeJumpsOnlyWhileLocked) {
    TrackerState state;
    state.threshold = 0.6;
    state.max_disp_m = 100.0;
    const auto first = apply_motion_model(state, at(3, 47.0, 0.9));
    EXPECT_FALSE(first.corrected);
    EXPECT_TRUE(state.locked);
    // ~1.1 km away while locked: replaced by the previous output.
    const auto jump = apply_motion_model(state, at(6, 47.01, 0.3));
    EXPECT_TRUE(jump.corrected);
    EXPECT_EQ(jump.position, first.position);
    EXPECT_EQ(jump.t_s, 6.0);
    EXPECT_FALSE(state.locked);  // raw score 0.3 < threshold
    // Unlocked: the same jump passes.
    const auto free = apply_motion_model(state, at(9, 47.01, 0.3));
    EXPECT_FALSE(free.corrected);
    EXPECT_EQ(free.position.lat, 47.01);
}

TEST(MotionModel, SmallStepsPassWhileLocked) {
    TrackerState state;
    state.max_disp_m = 200.0;
    (void)apply_motion_model(state, at(3, 47.0, 0.9));
    const auto step = apply_motion_model(state, at(6, 47.001, 0.9));
    EXPECT_FALSE(step.corrected);
    EXPECT_EQ(step.position.lat, 47.001);
}

TEST(MotionModel, DegenerateSettingsReduceToPlain) {
    Rng rng(8);
    std::vector<TrackingEstimate> raw;
    for (int k = 0; k < 50; ++k) {
        raw.push_back(at(3.0 * (k + 1), uniform(rng, 47.0, 47.05), uniform01(rng)));
    }
    for (auto [threshold, max_disp] : {std::pair{-kInf, kInf}, std::pair{kInf, 0.0}}) {
        TrackerState state;
        state.threshold = threshold;
        state.max_disp_m = max_disp;
        for (const auto& e : raw) {
            const auto out = apply_motion_model(state, e);
            EXPECT_FALSE(out.corrected);
            EXPECT_EQ(out.position, e.position);
        }
    }
}

TEST(Tracker, ConvergenceTickNeedsADwell) {
    const std::vector<double> errors{9, 1, 1, 9, 1, 1, 1, 9, 1};
    EXPECT_EQ(convergence_tick(errors, 5.0, 3), std::optional<std::size_t>(4));
    EXPECT_EQ(convergence_tick(errors, 5.0, 1), std::optional<std::size_t>(1));
    EXPECT_EQ(convergence_tick(std::vector<double>{9, 9}, 5.0, 2), std::nullopt);
    // A run reaching the end counts even if shorter than the dwell.
    EXPECT_EQ(convergence_tick(std::vector<double>{9, 1, 1}, 5.0, 10), std::optional<std::size_t>(1));
}

TEST(TrackerConfig, RejectsBadValues) {
    TrackerConfig cfg;
    cfg.update_interval_s = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.error_bound_fraction = -0.1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
