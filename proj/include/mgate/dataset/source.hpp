#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgate/core/image.hpp"
#include "mgate/dataset/augment.hpp"
#include "mgate/eval/ground_truth.hpp"

namespace mgate {

struct SequenceItem {
    int index = 0;
    Frame frame;
    std::vector<GroundTruthBox> boxes;
    bool has_ground_truth = false;  // false outside the temporal ROI (warm-up frames)
};

/// Ordered frame stream with per-frame ground truth. One pass per reset.
class SequenceSource {
public:
    virtual ~SequenceSource() = default;

    virtual bool next(SequenceItem& item) = 0;  // false when exhausted
    virtual void reset() = 0;
    virtual int frame_count() const = 0;
    virtual int input_height() const = 0;
    virtual int input_width() const = 0;
    virtual std::string name() const = 0;
};

class MemorySource final : public SequenceSource {
public:
    MemorySource(std::string name, int height, int width, std::vector<SequenceItem> items)
        : name_(std::move(name)), height_(height), width_(width), items_(std::move(items)) {}

    bool next(SequenceItem& item) override {
        if (pos_ >= items_.size())
            return false;
        item = items_[pos_++];
        return true;
    }
    void reset() override { pos_ = 0; }
    int frame_count() const override { return static_cast<int>(items_.size()); }
    int input_height() const override { return height_; }
    int input_width() const override { return width_; }
    std::string name() const override { return name_; }

private:
    std::string name_;
    int height_, width_;
    std::vector<SequenceItem> items_;
    std::size_t pos_ = 0;
};

/// One rectangular blob translated by an integer step per frame. Integer
/// coordinates keep boxes pixel-exact, so ground truth is unambiguous.
struct BlobSpec {
    int start_frame = 0;
    int end_frame = 0;  // inclusive
    int x = 0, y = 0;   // top-left at start_frame, pixels
    int width = 0, height = 0;
    int dx = 0, dy = 0;  // per-frame step
    std::uint8_t b = 255, g = 255, r = 255;
    int class_id = 1;
};

struct SyntheticConfig {
    std::string name = "synthetic";
    int height = 64;
    int width = 64;
    int frame_count = 10;
    std::uint8_t bg_b = 32, bg_g = 32, bg_r = 32;
    std::vector<BlobSpec> blobs;
    int roi_first = 0;
    int roi_last = -1;  // -1 = last frame
};

/// Deterministic scene generator: flat background plus moving blobs, with
/// ground truth derived from the exact blob rects.
class SyntheticSource final : public SequenceSource {
public:
    explicit SyntheticSource(SyntheticConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.height < 1 || cfg_.width < 1 || cfg_.frame_count < 1)
            throw ConfigError("SyntheticSource: dims and frame_count must be >= 1");
        if (cfg_.roi_last < 0)
            cfg_.roi_last = cfg_.frame_count - 1;
    }

    bool next(SequenceItem& item) override {
        if (pos_ >= cfg_.frame_count)
            return false;
        item = render(pos_++);
        return true;
    }
    void reset() override { pos_ = 0; }
    int frame_count() const override { return cfg_.frame_count; }
    int input_height() const override { return cfg_.height; }
    int input_width() const override { return cfg_.width; }
    std::string name() const override { return cfg_.name; }

    SequenceItem render(int index) const {
        SequenceItem item;
        item.index = index;
        item.frame = Frame::solid(cfg_.height, cfg_.width, cfg_.bg_b, cfg_.bg_g, cfg_.bg_r);
        item.has_ground_truth = index >= cfg_.roi_first && index <= cfg_.roi_last;
        for (const auto& blob : cfg_.blobs) {
            if (index < blob.start_frame || index > blob.end_frame)
                continue;
            const int step = index - blob.start_frame;
            const int x0 = std::clamp(blob.x + blob.dx * step, 0, cfg_.width);
            const int y0 = std::clamp(blob.y + blob.dy * step, 0, cfg_.height);
            const int x1 = std::clamp(blob.x + blob.dx * step + blob.width, 0, cfg_.width);
            const int y1 = std::clamp(blob.y + blob.dy * step + blob.height, 0, cfg_.height);
            if (x0 >= x1 || y0 >= y1)
                continue;
            item.frame.fill_rect(x0, y0, x1, y1, blob.b, blob.g, blob.r);
            if (item.has_ground_truth) {
                GroundTruthBox gt;
                gt.box.left = static_cast<double>(x0) / cfg_.width;
                gt.box.top = static_cast<double>(y0) / cfg_.height;
                gt.box.right = static_cast<double>(x1) / cfg_.width;
                gt.box.bottom = static_cast<double>(y1) / cfg_.height;
                gt.class_id = blob.class_id;
                gt.frame_index = index;
                item.boxes.push_back(gt);
            }
        }
        return item;
    }

    const SyntheticConfig& config() const { return cfg_; }

private:
    SyntheticConfig cfg_;
    int pos_ = 0;
};

/// Applies the static distractor (from its start frame) and then per-frame
/// multiplicative noise to an inner stream. Ground truth passes through:
/// the distractor intentionally has no ground-truth box.
class AugmentingSource final : public SequenceSource {
public:
    AugmentingSource(std::unique_ptr<SequenceSource> inner,
                     std::optional<DistractorOverlay> distractor,
                     std::optional<NoiseConfig> noise)
        : inner_(std::move(inner)), distractor_(std::move(distractor)), noise_(noise) {
        if (!inner_)
            throw ConfigError("AugmentingSource: null inner source");
        if (noise_)
            noise_->validate();
    }

    bool next(SequenceItem& item) override {
        if (!inner_->next(item))
            return false;
        if (distractor_ && item.index >= distractor_->start_frame())
            item.frame = distractor_->apply(item.frame);
        if (noise_)
            item.frame = apply_noise(item.frame, *noise_, item.index);
        return true;
    }
    void reset() override { inner_->reset(); }
    int frame_count() const override { return inner_->frame_count(); }
    int input_height() const override { return inner_->input_height(); }
    int input_width() const override { return inner_->input_width(); }
    std::string name() const override { return inner_->name(); }

private:
    std::unique_ptr<SequenceSource> inner_;
    std::optional<DistractorOverlay> distractor_;
    std::optional<NoiseConfig> noise_;
};

}  // namespace mgate
