#pragma once

#include <cstdint>
#include <vector>

#include "mgate/core/connected_components.hpp"
#include "mgate/eval/ground_truth.hpp"

namespace mgate {

// CDNet2014 ground-truth label values.
namespace cdnet {
inline constexpr std::uint8_t kStatic = 0;
inline constexpr std::uint8_t kShadow = 50;
inline constexpr std::uint8_t kOutsideRoi = 85;
inline constexpr std::uint8_t kUnknown = 170;
inline constexpr std::uint8_t kMotion = 255;

/// Only confirmed motion counts as foreground; unknown and outside-ROI
/// labels fall back to background for box derivation.
inline bool is_foreground(std::uint8_t label) { return label >= 200; }
}  // namespace cdnet

/// Tight normalized boxes around connected foreground components of a
/// label mask. Components smaller than min_area pixels are dropped
/// (mask speckle). Box order follows each component's first pixel in a
/// row-major scan.
inline std::vector<GroundTruthBox> masks_to_boxes(const std::uint8_t* mask, int height, int width,
                                                  int frame_index, int min_area = 50,
                                                  int class_id = 1) {
    std::vector<std::uint8_t> fg(static_cast<std::size_t>(height) * width);
    for (std::size_t i = 0; i < fg.size(); ++i)
        fg[i] = cdnet::is_foreground(mask[i]) ? 1 : 0;

    std::vector<GroundTruthBox> boxes;
    for (const auto& c : find_components(fg.data(), height, width, min_area)) {
        GroundTruthBox b;
        b.box.left = static_cast<double>(c.left) / width;
        b.box.top = static_cast<double>(c.top) / height;
        b.box.right = static_cast<double>(c.right) / width;
        b.box.bottom = static_cast<double>(c.bottom) / height;
        b.class_id = class_id;
        b.frame_index = frame_index;
        boxes.push_back(b);
    }
    return boxes;
}

inline std::vector<GroundTruthBox> masks_to_boxes(const std::vector<std::uint8_t>& mask, int height,
                                                  int width, int frame_index, int min_area = 50,
                                                  int class_id = 1) {
    if (mask.size() != static_cast<std::size_t>(height) * width)
        throw ShapeError("masks_to_boxes: mask size does not match dims");
    return masks_to_boxes(mask.data(), height, width, frame_index, min_area, class_id);
}

}  // namespace mgate
