#include <powerloc/config.hpp>

#include <gtest/gtest.h>

using namespace powerloc;

TEST(RunConfig, EmptyObjectGivesDefaults) {
    const auto cfg = run_config_from_json("{}");
    const RunConfig defaults;
    EXPECT_EQ(run_config_to_json(cfg), run_config_to_json(defaults));
    EXPECT_EQ(cfg.seed, 1u);
    EXPECT_EQ(cfg.preprocess.downsample_factor, 10);
    EXPECT_DOUBLE_EQ(cfg.tracker.threshold, 0.6);
    EXPECT_EQ(cfg.inference.particles, 500u);
}

TEST(RunConfig, RoundTripsThroughJson) {
    RunConfig cfg;
    cfg.seed = 99;
    cfg.preprocess.percentile = 0.9;
    cfg.tracker.matcher = Matcher::osb;
    cfg.tracker.max_disp_m = 200.0;
    cfg.inference.fixed_temperature = 0.5;
    cfg.inference.max_iterations = 12;
    cfg.synthworld.world.noise.transient_rate_hz = 0.01;
    cfg.eval.max_segments = 5;
    const auto text = run_config_to_json(cfg);
    EXPECT_EQ(run_config_to_json(run_config_from_json(text)), text);
}

TEST(RunConfig, PartialSectionsKeepOtherDefaults) {
    const auto cfg = run_config_from_json(R"({"tracker": {"matcher": "osb"}, "seed": 5})");
    EXPECT_EQ(cfg.tracker.matcher, Matcher::osb);
    EXPECT_DOUBLE_EQ(cfg.tracker.update_interval_s, 3.0);
    EXPECT_EQ(cfg.seed, 5u);
}

TEST(RunConfig, RejectsUnknownKeysAtEveryLevel) {
    for (const char* text : {
             R"({"sed": 1})",
             R"({"preprocess": {"window": 3}})",
             R"({"tracker": {"preprocess": {"znorm": true}}})",
             R"({"route_inference": {"particle": 10}})",
             R"({"synthworld": {"world": {"noise": {"sigma": 1}}}})",
             R"({"eval": {"trials": 3}})",
         }) {
        EXPECT_THROW((void)run_config_from_json(text), FormatError) << text;
    }
}

TEST(RunConfig, RejectsBadValuesAndTypes) {
    for (const char* text : {
             R"({"preprocess": {"downsample_factor": 0}})",
             R"({"preprocess": {"percentile": 2}})",
             R"({"tracker": {"matcher": "knn"}})",
             R"({"classifier": {"refs_per_route": "ten"}})",
             R"({"eval": {"min_segments": 8, "max_segments": 3}})",
             R"([1, 2])",
             "{",
         }) {
        EXPECT_THROW((void)run_config_from_json(text), FormatError) << text;
    }
}
