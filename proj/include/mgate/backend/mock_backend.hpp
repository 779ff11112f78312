#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <thread>
#include <vector>

#include "mgate/backend/split_detector.hpp"
#include "mgate/core/connected_components.hpp"
#include "mgate/core/errors.hpp"
#include "mgate/util/rng.hpp"

namespace mgate {

struct MockConfig {
    int block = 8;                // B: pixel block size per feature cell
    int proj_channels = 0;        // 0 = raw per-channel block means (C=3)
    std::uint64_t proj_seed = 0;  // seeds the fixed random projection
    double blob_threshold = 180.0;  // cell luminance at or above this is "object"
    int min_blob_cells = 1;
    std::vector<Detection> canned;  // emitted on every head call, pixels ignored
    std::chrono::microseconds extract_delay{0};  // artificial stage costs
    std::chrono::microseconds head_delay{0};
};

/// Deterministic detector stand-in. The extractor averages non-overlapping
/// BxB pixel blocks per channel (edge blocks may be partial), optionally
/// followed by a fixed seeded random projection. The head reports bright
/// connected blobs over cell luminance plus any canned detections.
///
/// With a projection enabled the head cannot recover luminance from the
/// features, so it emits canned detections only.
class MockDetector final : public SplitDetector {
public:
    MockDetector(int input_height, int input_width, MockConfig config = {})
        : config_(config) {
        if (config_.block < 1)
            throw ConfigError("MockDetector: block size must be >= 1");
        if (config_.proj_channels < 0)
            throw ConfigError("MockDetector: proj_channels must be >= 0");
        spec_.layer_count = 2;
        spec_.split_index = 1;
        spec_.input_height = input_height;
        spec_.input_width = input_width;
        spec_.grid_height = (input_height + config_.block - 1) / config_.block;
        spec_.grid_width = (input_width + config_.block - 1) / config_.block;
        spec_.grid_channels = config_.proj_channels > 0 ? config_.proj_channels : 3;
        spec_.validate();
        if (config_.proj_channels > 0) {
            projection_.resize(static_cast<std::size_t>(3) * config_.proj_channels);
            for (std::size_t i = 0; i < projection_.size(); ++i) {
                const std::uint64_t bits = mix_seed(config_.proj_seed, i);
                projection_[i] = static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
            }
        }
    }

    FeatureMap extract_features(const Frame& frame) override {
        if (frame.height != spec_.input_height || frame.width != spec_.input_width)
            throw ShapeError("MockDetector: frame does not match configured input size");
        ++extract_calls_;
        if (config_.extract_delay.count() > 0)
            std::this_thread::sleep_for(config_.extract_delay);

        FeatureMap out(spec_.grid_height, spec_.grid_width, spec_.grid_channels);
        const int B = config_.block;
        for (int gy = 0; gy < out.height; ++gy) {
            for (int gx = 0; gx < out.width; ++gx) {
                const int y0 = gy * B;
                const int x0 = gx * B;
                const int y1 = std::min(y0 + B, frame.height);
                const int x1 = std::min(x0 + B, frame.width);
                double sum[3] = {0.0, 0.0, 0.0};
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) {
                        const std::uint8_t* px = frame.pixel(x, y);
                        sum[0] += px[0];
                        sum[1] += px[1];
                        sum[2] += px[2];
                    }
                }
                const double n = static_cast<double>((y1 - y0) * (x1 - x0));
                double mean[3] = {sum[0] / n, sum[1] / n, sum[2] / n};
                double* cell = &out.values[out.cell_offset(gx, gy)];
                if (config_.proj_channels > 0) {
                    for (int c = 0; c < config_.proj_channels; ++c) {
                        double acc = 0.0;
                        for (int k = 0; k < 3; ++k)
                            acc += mean[k] * projection_[static_cast<std::size_t>(k) * config_.proj_channels + c];
                        cell[c] = acc;
                    }
                } else {
                    for (int k = 0; k < 3; ++k) cell[k] = mean[k];
                }
            }
        }
        return out;
    }

    std::vector<Detection> run_head(const Frame& frame, const FeatureMap& features) override {
        (void)frame;  // head works from cached activations only
        if (features.height != spec_.grid_height || features.width != spec_.grid_width ||
            features.channels != spec_.grid_channels)
            throw ShapeError("MockDetector: features do not match the extractor grid");
        ++head_calls_;
        if (config_.head_delay.count() > 0)
            std::this_thread::sleep_for(config_.head_delay);

        std::vector<Detection> dets;
        if (config_.proj_channels == 0) {
            std::vector<std::uint8_t> mask(static_cast<std::size_t>(features.height) * features.width, 0);
            for (int gy = 0; gy < features.height; ++gy) {
                for (int gx = 0; gx < features.width; ++gx) {
                    const double* cell = features.cell(gx, gy);
                    const double luma = (cell[0] + cell[1] + cell[2]) / 3.0;
                    if (luma >= config_.blob_threshold)
                        mask[static_cast<std::size_t>(gy) * features.width + gx] = 1;
                }
            }
            const auto blobs = find_components(mask.data(), features.height, features.width,
                                               config_.min_blob_cells);
            const double total = static_cast<double>(features.height) * features.width;
            for (const auto& b : blobs) {
                Detection d;
                d.box.left = static_cast<double>(b.left) / features.width;
                d.box.top = static_cast<double>(b.top) / features.height;
                d.box.right = static_cast<double>(b.right) / features.width;
                d.box.bottom = static_cast<double>(b.bottom) / features.height;
                d.class_id = 1;
                d.score = std::min(1.0, 0.5 + 0.5 * static_cast<double>(b.area) / total);
                dets.push_back(d);
            }
        }
        dets.insert(dets.end(), config_.canned.begin(), config_.canned.end());
        return dets;
    }

    const SplitDetectorSpec& spec() const override { return spec_; }

    // Execution counters; run_head must leave extract_calls untouched.
    long extract_calls() const { return extract_calls_; }
    long head_calls() const { return head_calls_; }

private:
    MockConfig config_;
    SplitDetectorSpec spec_;
    std::vector<double> projection_;  // 3 x proj_channels, row-major
    long extract_calls_ = 0;
    long head_calls_ = 0;
};

}  // namespace mgate
