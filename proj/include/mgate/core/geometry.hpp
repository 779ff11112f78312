#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgate {

/// Axis-aligned box in normalized image coordinates, each edge in [0, 1]
/// as a fraction of the frame extent.
struct NormalizedBox {
    double left = 0.0;
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;

    bool valid() const {
        return left >= 0.0 && left < right && right <= 1.0 &&
               top >= 0.0 && top < bottom && bottom <= 1.0;
    }

    double width() const { return right - left; }
    double height() const { return bottom - top; }
    double area() const { return width() * height(); }
};

/// Integer cell rectangle on an H x W grid, half-open:
/// [left, right) x [top, bottom).
struct GridRect {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    int width() const { return right - left; }
    int height() const { return bottom - top; }
    long cell_count() const { return static_cast<long>(width()) * height(); }
};

/// Scales a normalized box onto an H x W cell grid. Continuous coordinates
/// are snapped outward (floor on left/top, ceil on right/bottom) and clamped,
/// so the rect always covers the box and is never empty. With the grid set to
/// the input image size this yields pixel coordinates.
inline GridRect map_box_to_grid(const NormalizedBox& box, int grid_h, int grid_w) {
    if (!box.valid())
        throw std::invalid_argument("map_box_to_grid: invalid normalized box");
    if (grid_h < 1 || grid_w < 1)
        throw std::invalid_argument("map_box_to_grid: grid dimensions must be >= 1");

    GridRect r;
    r.left = std::clamp(static_cast<int>(std::floor(box.left * grid_w)), 0, grid_w - 1);
    r.top = std::clamp(static_cast<int>(std::floor(box.top * grid_h)), 0, grid_h - 1);
    r.right = std::clamp(static_cast<int>(std::ceil(box.right * grid_w)), r.left + 1, grid_w);
    r.bottom = std::clamp(static_cast<int>(std::ceil(box.bottom * grid_h)), r.top + 1, grid_h);
    return r;
}

}  // namespace mgate
