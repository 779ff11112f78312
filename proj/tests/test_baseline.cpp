#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mgate/backend/mock_backend.hpp"
#include "mgate/baseline/pixel_gate.hpp"

using namespace mgate;

namespace {

PixelBackground make_bg(const Frame& f, double alpha = 0.9) {
    PixelBackground bg(alpha);
    bg.initialize(f);
    return bg;
}

}  // namespace

TEST(PixelMotionScore, ClosedFormUniformDiff) {
    // 15x15 frame, one cell, every channel off by 10: sqrt(15*15*3*100)
    Frame ref = Frame::solid(15, 15, 100, 100, 100);
    Frame cur = Frame::solid(15, 15, 110, 110, 110);
    auto bg = make_bg(ref);
    auto s = pixel_motion_score(bg, cur, 1, 1);
    ASSERT_EQ(s.values.size(), 1u);
    EXPECT_NEAR(s.at(0, 0), 10.0 * std::sqrt(675.0), 1e-9);
}

TEST(PixelMotionScore, IdenticalFramesScoreZero) {
    Frame ref = Frame::solid(20, 30, 12, 34, 56);
    auto bg = make_bg(ref);
    auto s = pixel_motion_score(bg, ref, 4, 5);
    for (double v : s.values)
        EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(PixelMotionScore, UnevenPartitionCoversEveryPixel) {
    // width 10 split into 3 -> columns 3, 3, 4; the wide cell picks up
    // the rightmost column
    Frame ref = Frame::solid(10, 10, 0, 0, 0);
    Frame cur = ref;
    for (int y = 0; y < 10; ++y)
        cur.pixel(9, y)[0] = 30;
    auto bg = make_bg(ref);
    auto s = pixel_motion_score(bg, cur, 1, 3);
    EXPECT_DOUBLE_EQ(s.at(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.at(1, 0), 0.0);
    EXPECT_NEAR(s.at(2, 0), std::sqrt(10.0 * 30.0 * 30.0), 1e-9);
}

TEST(PixelMotionScore, MatchesBruteForceOracle) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(2, 20);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 50; ++trial) {
        const int h = dim(rng), w = dim(rng);
        Frame ref = Frame::solid(h, w, 0, 0, 0);
        Frame cur = ref;
        for (auto& v : ref.data)
            v = static_cast<std::uint8_t>(byte(rng));
        for (auto& v : cur.data)
            v = static_cast<std::uint8_t>(byte(rng));
        std::uniform_int_distribution<int> gdim_h(1, h), gdim_w(1, w);
        const int gh = gdim_h(rng), gw = gdim_w(rng);

        auto bg = make_bg(ref);
        auto s = pixel_motion_score(bg, cur, gh, gw);

        // oracle: assign each pixel to its cell by the same even partition
        std::vector<double> want(static_cast<std::size_t>(gh) * gw, 0.0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                int gy = 0, gx = 0;
                while ((gy + 1) * h / gh <= y) ++gy;
                while ((gx + 1) * w / gw <= x) ++gx;
                for (int c = 0; c < 3; ++c) {
                    const double d = double(cur.pixel(x, y)[c]) - double(ref.pixel(x, y)[c]);
                    want[static_cast<std::size_t>(gy) * gw + gx] += d * d;
                }
            }
        }
        for (int gy = 0; gy < gh; ++gy)
            for (int gx = 0; gx < gw; ++gx)
                ASSERT_NEAR(s.at(gx, gy), std::sqrt(want[static_cast<std::size_t>(gy) * gw + gx]),
                            1e-9)
                    << "trial " << trial;
    }
}

TEST(PixelMotionScore, Validation) {
    Frame ref = Frame::solid(8, 8, 0, 0, 0);
    auto bg = make_bg(ref);
    EXPECT_THROW(pixel_motion_score(bg, ref, 9, 2), ShapeError);   // grid taller than frame
    EXPECT_THROW(pixel_motion_score(bg, ref, 0, 2), ShapeError);
    Frame other = Frame::solid(8, 9, 0, 0, 0);
    EXPECT_THROW(pixel_motion_score(bg, other, 2, 2), ShapeError);
    PixelBackground uninit(0.9);
    EXPECT_THROW(pixel_motion_score(uninit, ref, 2, 2), std::logic_error);
}

TEST(BaselineGate, ThresholdBoundary) {
    ScoreGrid s;
    s.height = 1;
    s.width = 2;
    s.values = {100.0, 250.0};
    EXPECT_EQ(baseline_gate(s, 250.0), FrameDecision::Moving);  // max == threshold
    EXPECT_EQ(baseline_gate(s, 250.0001), FrameDecision::Static);
    EXPECT_EQ(baseline_gate(s, 0.0), FrameDecision::Moving);
    EXPECT_THROW(baseline_gate(s, -1.0), std::invalid_argument);
    ScoreGrid empty;
    EXPECT_THROW(baseline_gate(empty, 10.0), ShapeError);
}

TEST(PixelBackground, EmaUpdate) {
    Frame ref = Frame::solid(4, 4, 100, 100, 100);
    PixelBackground bg(0.5);
    bg.initialize(ref);
    Frame cur = Frame::solid(4, 4, 0, 0, 0);
    bg.update(cur, 10.0, 100.0);  // below threshold: update happens
    EXPECT_DOUBLE_EQ(bg.values()[0], 50.0);
    bg.update(cur, 200.0, 100.0);  // at/above threshold: frozen
    EXPECT_DOUBLE_EQ(bg.values()[0], 50.0);
}

TEST(PixelBackground, AlphaOneNeverChanges) {
    Frame ref = Frame::solid(4, 4, 77, 77, 77);
    PixelBackground bg(1.0);
    bg.initialize(ref);
    bg.update(Frame::solid(4, 4, 0, 0, 0), 0.0, 1000.0);
    EXPECT_DOUBLE_EQ(bg.values()[0], 77.0);
}

TEST(PixelBackground, Lifecycle) {
    Frame ref = Frame::solid(4, 4, 0, 0, 0);
    PixelBackground bg(0.9);
    EXPECT_THROW(bg.update(ref, 0.0, 1.0), std::logic_error);
    bg.initialize(ref);
    EXPECT_THROW(bg.initialize(ref), std::logic_error);
    EXPECT_THROW(bg.update(Frame::solid(4, 5, 0, 0, 0), 0.0, 1.0), ShapeError);
    EXPECT_THROW(PixelBackground(1.5), ConfigError);
}

TEST(BaselinePipeline, GatesAndFilters) {
    MockConfig mock;
    Detection canned;  // parked in a corner that never moves
    canned.box = NormalizedBox{0.75, 0.75, 1.0, 1.0};
    canned.class_id = 7;
    canned.score = 0.9;
    mock.canned.push_back(canned);
    MockDetector det(64, 64, mock);

    BaselineConfig cfg;
    cfg.threshold = 500.0;
    BaselinePipeline pipe(det, cfg);
    EXPECT_EQ(pipe.config().grid_height, det.spec().grid_height);

    Frame black = Frame::solid(64, 64, 0, 0, 0);
    auto r = pipe.process_frame(black);
    EXPECT_EQ(r.decision, FrameDecision::Static);  // init frame scores zero
    EXPECT_FALSE(r.head_invoked);
    EXPECT_DOUBLE_EQ(r.timings.extract_us, 0.0);

    Frame blob = black;
    blob.fill_rect(16, 16, 32, 32, 255, 255, 255);
    // fully-covered 8x8 cell: 255 * sqrt(3*64) well above 500
    r = pipe.process_frame(blob);
    EXPECT_EQ(r.decision, FrameDecision::Moving);
    EXPECT_TRUE(r.head_invoked);
    ASSERT_EQ(r.detections.size(), 1u);
    EXPECT_EQ(r.detections[0].class_id, 1);  // canned class-7 box filtered out
    EXPECT_DOUBLE_EQ(r.detections[0].box.left, 0.25);
    EXPECT_EQ(pipe.head_invocations(), 1);
    EXPECT_EQ(det.extract_calls(), 1);  // extractor never ran on the static frame
}

TEST(BaselinePipeline, ThresholdZeroRunsEveryFrame) {
    MockDetector det(32, 32);
    BaselineConfig cfg;
    cfg.threshold = 0.0;
    BaselinePipeline pipe(det, cfg);
    Frame f = Frame::solid(32, 32, 10, 10, 10);
    for (int i = 0; i < 4; ++i) {
        auto r = pipe.process_frame(f);
        EXPECT_EQ(r.decision, FrameDecision::Moving);
        EXPECT_TRUE(r.head_invoked);
    }
    EXPECT_EQ(pipe.head_invocations(), 4);
}

TEST(BaselinePipeline, ExplicitGridOverride) {
    MockDetector det(40, 40);
    BaselineConfig cfg;
    cfg.grid_height = 5;
    cfg.grid_width = 4;
    BaselinePipeline pipe(det, cfg);
    pipe.process_frame(Frame::solid(40, 40, 0, 0, 0));
    EXPECT_EQ(pipe.last_scores().height, 5);
    EXPECT_EQ(pipe.last_scores().width, 4);
}

TEST(BaselinePipeline, ConfigValidation) {
    MockDetector det(32, 32);
    BaselineConfig cfg;
    cfg.threshold = -5.0;
    EXPECT_THROW(BaselinePipeline(det, cfg), ConfigError);
}
