#pragma once

#include <stdexcept>
#include <vector>

#include "mgate/core/detection.hpp"
#include "mgate/core/geometry.hpp"
#include "mgate/core/motion_map.hpp"

namespace mgate {

/// Arithmetic mean of grid values over the cells of `rect`. Partially covered
/// edge cells count at full weight.
template <typename Grid>
double rect_mean(const Grid& grid, const GridRect& rect) {
    double sum = 0.0;
    for (int y = rect.top; y < rect.bottom; ++y)
        for (int x = rect.left; x < rect.right; ++x)
            sum += grid.at(x, y);
    return sum / static_cast<double>(rect.cell_count());
}

/// Keeps a detection iff the mean grid value over its mapped cell rect is
/// >= threshold. Relative order of survivors is preserved.
template <typename Grid>
std::vector<Detection> filter_detections_by_grid(const std::vector<Detection>& detections,
                                                 const Grid& grid, double threshold) {
    std::vector<Detection> kept;
    kept.reserve(detections.size());
    for (const Detection& d : detections) {
        GridRect rect = map_box_to_grid(d.box, grid.height, grid.width);
        if (rect_mean(grid, rect) >= threshold)
            kept.push_back(d);
    }
    return kept;
}

/// Drops detections whose box region shows no motion: a box survives iff the
/// mean motion over its cells is >= lambda.
inline std::vector<Detection> filter_detections(const std::vector<Detection>& detections,
                                                const MotionMap& motion, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("filter_detections: lambda outside [0, 1]");
    if (motion.values.empty())
        throw ShapeError("filter_detections: empty motion map");
    return filter_detections_by_grid(detections, motion, lambda);
}

}  // namespace mgate
