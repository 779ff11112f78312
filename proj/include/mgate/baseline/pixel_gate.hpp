#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "mgate/backend/split_detector.hpp"
#include "mgate/core/detection_filter.hpp"
#include "mgate/core/errors.hpp"
#include "mgate/core/image.hpp"
#include "mgate/core/pipeline.hpp"

namespace mgate {

/// Per-cell L2 pixel-difference scores. Unlike MotionMap these are raw
/// intensity norms, so useful thresholds sit in the hundreds.
struct ScoreGrid {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }

    double max_value() const {
        return *std::max_element(values.begin(), values.end());
    }
};

/// EMA background over raw pixel intensities, the comparison method's
/// counterpart of the feature-space BackgroundModel.
class PixelBackground {
public:
    explicit PixelBackground(double alpha) : alpha_(alpha) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ConfigError("PixelBackground: alpha outside [0, 1]");
    }

    void initialize(const Frame& reference) {
        if (initialized_)
            throw std::logic_error("PixelBackground: already initialized");
        height_ = reference.height;
        width_ = reference.width;
        values_.assign(reference.data.begin(), reference.data.end());
        initialized_ = true;
    }

    void update(const Frame& current, double score_max, double threshold) {
        if (!initialized_)
            throw std::logic_error("PixelBackground: not initialized");
        if (current.height != height_ || current.width != width_)
            throw ShapeError("PixelBackground: frame shape changed");
        if (score_max >= threshold)
            return;
        if (alpha_ == 1.0)
            return;
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] = alpha_ * values_[i] + (1.0 - alpha_) * current.data[i];
    }

    bool initialized() const { return initialized_; }
    int height() const { return height_; }
    int width() const { return width_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& values() const { return values_; }

private:
    double alpha_;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> values_;  // H*W*3, interleaved like Frame
    bool initialized_ = false;
};

/// Partitions the frame into grid_h x grid_w cells (pixel ranges split
/// evenly, remainder spread across cells) and reports, per cell, the L2 norm
/// of the intensity difference against the background over all pixels and
/// channels in the cell.
inline ScoreGrid pixel_motion_score(const PixelBackground& background, const Frame& frame,
                                    int grid_h, int grid_w) {
    if (!background.initialized())
        throw std::logic_error("pixel_motion_score: background not initialized");
    if (frame.height != background.height() || frame.width != background.width())
        throw ShapeError("pixel_motion_score: frame and background dims differ");
    if (grid_h < 1 || grid_h > frame.height || grid_w < 1 || grid_w > frame.width)
        throw ShapeError("pixel_motion_score: grid does not fit the frame");

    ScoreGrid out;
    out.height = grid_h;
    out.width = grid_w;
    out.values.resize(static_cast<std::size_t>(grid_h) * grid_w);

    const auto& bg = background.values();
    for (int gy = 0; gy < grid_h; ++gy) {
        const int y0 = gy * frame.height / grid_h;
        const int y1 = (gy + 1) * frame.height / grid_h;
        for (int gx = 0; gx < grid_w; ++gx) {
            const int x0 = gx * frame.width / grid_w;
            const int x1 = (gx + 1) * frame.width / grid_w;
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const std::size_t off = (static_cast<std::size_t>(y) * frame.width + x) * 3;
                    for (int c = 0; c < 3; ++c) {
                        const double d = static_cast<double>(frame.data[off + c]) - bg[off + c];
                        sum += d * d;
                    }
                }
            }
            out.values[static_cast<std::size_t>(gy) * grid_w + gx] = std::sqrt(sum);
        }
    }
    return out;
}

inline FrameDecision baseline_gate(const ScoreGrid& scores, double threshold) {
    if (scores.values.empty())
        throw ShapeError("baseline_gate: empty score grid");
    if (!(threshold >= 0.0))
        throw std::invalid_argument("baseline_gate: threshold must be >= 0");
    return scores.max_value() >= threshold ? FrameDecision::Moving : FrameDecision::Static;
}

struct BaselineConfig {
    double threshold = 500.0;
    double alpha = 0.9;
    int grid_height = 0;  // 0 = match the backend's feature grid
    int grid_width = 0;
};

/// Pixel-gated detection with the same stage structure as Pipeline: gate on
/// pixel scores, run the full detector (prefix + head) only on Moving
/// frames, filter boxes by mean cell score over the mapped rect.
class BaselinePipeline {
public:
    BaselinePipeline(SplitDetector& backend, BaselineConfig config)
        : backend_(&backend), config_(config), background_(config.alpha) {
        if (!(config_.threshold >= 0.0))
            throw ConfigError("BaselineConfig: threshold must be >= 0");
        if (config_.grid_height == 0) config_.grid_height = backend.spec().grid_height;
        if (config_.grid_width == 0) config_.grid_width = backend.spec().grid_width;
        if (config_.grid_height < 1 || config_.grid_width < 1)
            throw ConfigError("BaselineConfig: grid dims must be >= 1");
    }

    void initialize(const Frame& reference) { background_.initialize(reference); }
    bool initialized() const { return background_.initialized(); }

    FrameResult process_frame(const Frame& frame) {
        using clock = std::chrono::steady_clock;
        const auto us = [](clock::time_point a, clock::time_point b) {
            return std::chrono::duration<double, std::micro>(b - a).count();
        };
        FrameResult result;

        auto t0 = clock::now();
        if (!background_.initialized())
            background_.initialize(frame);
        last_scores_ = pixel_motion_score(background_, frame, config_.grid_height,
                                          config_.grid_width);
        result.motion_max = last_scores_.max_value();
        result.decision = baseline_gate(last_scores_, config_.threshold);
        background_.update(frame, result.motion_max, config_.threshold);
        auto t1 = clock::now();
        result.timings.gate_us = us(t0, t1);

        ++frames_;
        if (result.decision == FrameDecision::Static)
            return result;

        std::vector<Detection> raw;
        try {
            FeatureMap features = backend_->extract_features(frame);
            auto t2 = clock::now();
            result.timings.extract_us = us(t1, t2);
            raw = backend_->run_head(frame, features);
            result.timings.head_us = us(t2, clock::now());
        } catch (const BackendError& e) {
            throw BackendError("detector stage: " + std::string(e.what()));
        }
        result.head_invoked = true;
        ++head_invocations_;

        auto t3 = clock::now();
        result.detections = filter_detections_by_grid(raw, last_scores_, config_.threshold);
        result.timings.filter_us = us(t3, clock::now());
        return result;
    }

    const BaselineConfig& config() const { return config_; }
    const ScoreGrid& last_scores() const { return last_scores_; }
    long frames() const { return frames_; }
    long head_invocations() const { return head_invocations_; }

private:
    SplitDetector* backend_;  // not owned
    BaselineConfig config_;
    PixelBackground background_;
    ScoreGrid last_scores_;
    long frames_ = 0;
    long head_invocations_ = 0;
};

}  // namespace mgate
