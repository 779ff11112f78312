#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgate/dataset/manifest.hpp"
#include "mgate/dataset/mask_boxes.hpp"
#include "mgate/dataset/opencv_interop.hpp"
#include "mgate/dataset/source.hpp"

namespace mgate {

/// Box-file schema: {"frames": {"<index>": [{"left":..,"top":..,"right":..,
/// "bottom":..,"class_id":1}, ...]}}, coordinates normalized.
inline std::map<int, std::vector<GroundTruthBox>> load_box_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open box file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("box file is not valid JSON: " + std::string(e.what()));
    }
    std::map<int, std::vector<GroundTruthBox>> out;
    for (const auto& [key, arr] : j.at("frames").items()) {
        const int idx = std::stoi(key);
        for (const auto& b : arr) {
            GroundTruthBox gt;
            gt.box.left = b.at("left").get<double>();
            gt.box.top = b.at("top").get<double>();
            gt.box.right = b.at("right").get<double>();
            gt.box.bottom = b.at("bottom").get<double>();
            gt.class_id = b.value("class_id", 1);
            gt.frame_index = idx;
            if (!gt.box.valid())
                throw ConfigError("box file " + path + ": invalid box at frame " + key);
            out[idx].push_back(gt);
        }
    }
    return out;
}

/// Streams a manifest's frames from disk, resized (bilinear) to the detector
/// input. Ground truth is derived at native mask resolution and normalized,
/// so boxes are independent of the resize. Frames outside the temporal ROI
/// stream without ground truth (background warm-up).
class FileSequenceSource final : public SequenceSource {
public:
    FileSequenceSource(SequenceManifest manifest, int input_height, int input_width)
        : manifest_(std::move(manifest)), height_(input_height), width_(input_width) {
        manifest_.validate();
        if (height_ < 1 || width_ < 1)
            throw ConfigError("FileSequenceSource: input dims must be >= 1");
        if (manifest_.gt_kind == GroundTruthKind::BoxFile)
            boxes_ = load_box_file(manifest_.box_file);
    }

    bool next(SequenceItem& item) override {
        if (pos_ >= static_cast<int>(manifest_.frame_paths.size()))
            return false;
        const int idx = pos_++;
        item = SequenceItem{};
        item.index = idx;
        item.frame = imread_frame(manifest_.frame_paths[idx], height_, width_);
        item.has_ground_truth =
            idx >= manifest_.roi_first && idx <= manifest_.resolved_roi_last() &&
            manifest_.gt_kind != GroundTruthKind::None;
        if (!item.has_ground_truth)
            return true;
        if (manifest_.gt_kind == GroundTruthKind::MaskDir) {
            int mh = 0, mw = 0;
            const auto mask = imread_mask(manifest_.mask_paths[idx], mh, mw);
            item.boxes = masks_to_boxes(mask, mh, mw, idx, manifest_.min_component_area);
        } else {
            auto it = boxes_.find(idx);
            if (it != boxes_.end())
                item.boxes = it->second;
        }
        return true;
    }

    void reset() override { pos_ = 0; }
    int frame_count() const override { return static_cast<int>(manifest_.frame_paths.size()); }
    int input_height() const override { return height_; }
    int input_width() const override { return width_; }
    std::string name() const override { return manifest_.name; }

private:
    SequenceManifest manifest_;
    int height_, width_;
    std::map<int, std::vector<GroundTruthBox>> boxes_;
    int pos_ = 0;
};

}  // namespace mgate
