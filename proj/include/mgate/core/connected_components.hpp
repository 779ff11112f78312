#pragma once

#include <cstdint>
#include <vector>

#include "mgate/core/errors.hpp"

namespace mgate {

/// Tight half-open bounding box of one foreground component.
struct PixelComponent {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;
    int area = 0;
};

/// 8-connected component labeling over a binary mask (nonzero = foreground).
/// Components are reported in the order their first pixel appears in a
/// row-major scan; components smaller than min_area are discarded.
inline std::vector<PixelComponent> find_components(const std::uint8_t* mask, int height,
                                                   int width, int min_area = 1) {
    if (height < 1 || width < 1)
        throw ShapeError("find_components: dimensions must be >= 1");

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(height) * width, 0);
    std::vector<PixelComponent> out;
    std::vector<int> stack;

    auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!mask[idx(x, y)] || visited[idx(x, y)])
                continue;
            PixelComponent c{x, y, x + 1, y + 1, 0};
            stack.clear();
            stack.push_back(static_cast<int>(idx(x, y)));
            visited[idx(x, y)] = 1;
            while (!stack.empty()) {
                int p = stack.back();
                stack.pop_back();
                int py = p / width, px = p % width;
                ++c.area;
                c.left = px < c.left ? px : c.left;
                c.top = py < c.top ? py : c.top;
                c.right = px + 1 > c.right ? px + 1 : c.right;
                c.bottom = py + 1 > c.bottom ? py + 1 : c.bottom;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = px + dx, ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= width || ny >= height)
                            continue;
                        if (mask[idx(nx, ny)] && !visited[idx(nx, ny)]) {
                            visited[idx(nx, ny)] = 1;
                            stack.push_back(static_cast<int>(idx(nx, ny)));
                        }
                    }
                }
            }
            if (c.area >= min_area)
                out.push_back(c);
        }
    }
    return out;
}

inline std::vector<PixelComponent> find_components(const std::vector<std::uint8_t>& mask,
                                                   int height, int width, int min_area = 1) {
    if (mask.size() != static_cast<std::size_t>(height) * width)
        throw ShapeError("find_components: mask size does not match dimensions");
    return find_components(mask.data(), height, width, min_area);
}

}  // namespace mgate
