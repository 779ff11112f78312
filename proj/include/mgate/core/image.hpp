#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mgate/core/errors.hpp"

namespace mgate {

/// Interleaved 3-channel 8-bit image, BGR channel order, row-major.
struct Frame {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    Frame() = default;

    Frame(int h, int w) : height(h), width(w) {
        if (h < 1 || w < 1)
            throw ShapeError("Frame: dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(h) * w * 3, 0);
    }

    static Frame solid(int h, int w, std::uint8_t b, std::uint8_t g, std::uint8_t r) {
        Frame f(h, w);
        for (std::size_t i = 0; i < f.data.size(); i += 3) {
            f.data[i] = b;
            f.data[i + 1] = g;
            f.data[i + 2] = r;
        }
        return f;
    }

    bool empty() const { return data.empty(); }

    std::uint8_t* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    bool same_shape(const Frame& o) const {
        return height == o.height && width == o.width;
    }

    /// Fills the half-open pixel rect [x0, x1) x [y0, y1), clamped to the frame.
    void fill_rect(int x0, int y0, int x1, int y1,
                   std::uint8_t b, std::uint8_t g, std::uint8_t r) {
        x0 = std::clamp(x0, 0, width);
        x1 = std::clamp(x1, 0, width);
        y0 = std::clamp(y0, 0, height);
        y1 = std::clamp(y1, 0, height);
        for (int y = y0; y < y1; ++y) {
            std::uint8_t* p = pixel(x0, y);
            for (int x = x0; x < x1; ++x) {
                *p++ = b;
                *p++ = g;
                *p++ = r;
            }
        }
    }
};

}  // namespace mgate
