#pragma once

#include <algorithm>

#include "mgate/core/geometry.hpp"

namespace mgate {

/// Intersection-over-union of two normalized boxes, in [0, 1].
inline double iou(const NormalizedBox& a, const NormalizedBox& b) {
    const double ix = std::max(0.0, std::min(a.right, b.right) - std::max(a.left, b.left));
    const double iy = std::max(0.0, std::min(a.bottom, b.bottom) - std::max(a.top, b.top));
    const double inter = ix * iy;
    if (inter <= 0.0)
        return 0.0;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

}  // namespace mgate
