#pragma once

#include <chrono>
#include <utility>
#include <vector>

#include "mgate/backend/split_detector.hpp"
#include "mgate/core/background_model.hpp"
#include "mgate/core/detection_filter.hpp"
#include "mgate/core/errors.hpp"
#include "mgate/core/motion_map.hpp"

namespace mgate {

struct GateConfig {
    int layer_index = 1;        // m, split point in [1..N]
    double lambda_gate = 0.4;   // frame-level motion threshold
    double lambda_filter = 0.4; // per-box motion threshold; defaults equal to gate
    double alpha = 0.9;         // background EMA retention

    void validate(int layer_count) const {
        if (layer_index < 1 || layer_index > layer_count)
            throw ConfigError("GateConfig: layer_index outside [1, N]");
        if (lambda_gate < 0.0 || lambda_gate > 1.0)
            throw ConfigError("GateConfig: lambda_gate outside [0, 1]");
        if (lambda_filter < 0.0 || lambda_filter > 1.0)
            throw ConfigError("GateConfig: lambda_filter outside [0, 1]");
        if (alpha < 0.0 || alpha > 1.0)
            throw ConfigError("GateConfig: alpha outside [0, 1]");
    }
};

struct StageTimings {
    double extract_us = 0.0;
    double gate_us = 0.0;
    double head_us = 0.0;
    double filter_us = 0.0;

    double total_us() const { return extract_us + gate_us + head_us + filter_us; }
};

struct FrameResult {
    FrameDecision decision = FrameDecision::Static;
    std::vector<Detection> detections;  // empty when Static
    double motion_max = 0.0;
    StageTimings timings;
    bool head_invoked = false;
};

/// Motion-gated detection over one frame stream. The extractor prefix always
/// runs; the head runs only on frames gated as Moving, and surviving
/// detections are those whose box region shows enough mean motion. The
/// background model updates only while the scene stays below the gate
/// threshold. Single-writer: one instance per stream, frames in order.
class Pipeline {
public:
    Pipeline(SplitDetector& backend, GateConfig config)
        : backend_(&backend), config_(validated(config, backend.spec().layer_count)),
          background_(config.alpha) {}

    /// Seeds the background from a designated reference frame. Optional;
    /// the first processed frame is used when this was never called.
    void initialize(const Frame& reference) {
        background_.initialize(stage_extract(reference));
    }

    bool initialized() const { return background_.initialized(); }

    FrameResult process_frame(const Frame& frame) {
        using clock = std::chrono::steady_clock;
        const auto us = [](clock::time_point a, clock::time_point b) {
            return std::chrono::duration<double, std::micro>(b - a).count();
        };
        FrameResult result;

        auto t0 = clock::now();
        FeatureMap features = stage_extract(frame);
        auto t1 = clock::now();
        result.timings.extract_us = us(t0, t1);

        if (!background_.initialized())
            background_.initialize(features);
        last_motion_ = compute_motion_map(background_.map(), features);
        result.motion_max = last_motion_.max_value();
        result.decision = gate_frame(last_motion_, config_.lambda_gate);
        background_.update(features, result.motion_max, config_.lambda_gate);
        auto t2 = clock::now();
        result.timings.gate_us = us(t1, t2);

        ++frames_;
        if (result.decision == FrameDecision::Static)
            return result;

        std::vector<Detection> raw;
        try {
            raw = backend_->run_head(frame, features);
        } catch (const BackendError& e) {
            throw BackendError("head stage: " + std::string(e.what()));
        }
        result.head_invoked = true;
        ++head_invocations_;
        auto t3 = clock::now();
        result.timings.head_us = us(t2, t3);

        result.detections = filter_detections(raw, last_motion_, config_.lambda_filter);
        result.timings.filter_us = us(t3, clock::now());
        return result;
    }

    const GateConfig& config() const { return config_; }
    const BackgroundModel& background() const { return background_; }
    const MotionMap& last_motion() const { return last_motion_; }
    long frames() const { return frames_; }
    long head_invocations() const { return head_invocations_; }

private:
    // runs before the background model member is constructed, so bad gate
    // settings always surface as ConfigError
    static GateConfig validated(GateConfig config, int layer_count) {
        config.validate(layer_count);
        return config;
    }

    FeatureMap stage_extract(const Frame& frame) {
        try {
            return backend_->extract_features(frame);
        } catch (const BackendError& e) {
            throw BackendError("extract stage: " + std::string(e.what()));
        }
    }

    SplitDetector* backend_;  // not owned
    GateConfig config_;
    BackgroundModel background_;
    MotionMap last_motion_;
    long frames_ = 0;
    long head_invocations_ = 0;
};

/// Ungated reference path: the detector runs in full on every frame and
/// nothing is filtered. The comparison anchor for speedup and MAP claims.
class RawPipeline {
public:
    explicit RawPipeline(SplitDetector& backend) : backend_(&backend) {}

    void initialize(const Frame&) {}  // stateless, accepts the call for interface parity

    FrameResult process_frame(const Frame& frame) {
        using clock = std::chrono::steady_clock;
        const auto us = [](clock::time_point a, clock::time_point b) {
            return std::chrono::duration<double, std::micro>(b - a).count();
        };
        FrameResult result;
        result.decision = FrameDecision::Moving;
        result.head_invoked = true;
        try {
            auto t0 = clock::now();
            FeatureMap features = backend_->extract_features(frame);
            auto t1 = clock::now();
            result.detections = backend_->run_head(frame, features);
            result.timings.extract_us = us(t0, t1);
            result.timings.head_us = us(t1, clock::now());
        } catch (const BackendError& e) {
            throw BackendError("detector stage: " + std::string(e.what()));
        }
        ++frames_;
        ++head_invocations_;
        return result;
    }

    long frames() const { return frames_; }
    long head_invocations() const { return head_invocations_; }

private:
    SplitDetector* backend_;  // not owned
    long frames_ = 0;
    long head_invocations_ = 0;
};

}  // namespace mgate
