#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mgate/core/errors.hpp"

namespace mgate {

/// Dense H x W x C activation grid. Each grid cell holds a C-dimensional
/// vector describing one receptive-field patch of the input image.
///
/// Layout is cell-major: the vector of cell (x, y) is contiguous at
/// values[(y * width + x) * channels].
struct FeatureMap {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;

    FeatureMap() = default;

    FeatureMap(int h, int w, int c) : height(h), width(w), channels(c) {
        if (h < 1 || w < 1 || c < 1)
            throw ShapeError("FeatureMap: dimensions must be >= 1");
        values.assign(static_cast<std::size_t>(h) * w * c, 0.0);
    }

    /// Wraps externally produced data; validates length and finiteness.
    static FeatureMap from_values(int h, int w, int c, std::vector<double> v) {
        FeatureMap m(h, w, c);
        if (v.size() != m.values.size())
            throw ShapeError("FeatureMap: value count does not match dimensions");
        for (double x : v)
            if (!std::isfinite(x))
                throw std::invalid_argument("FeatureMap: non-finite activation value");
        m.values = std::move(v);
        return m;
    }

    bool empty() const { return values.empty(); }

    std::size_t cell_offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * channels;
    }

    double* cell(int x, int y) { return values.data() + cell_offset(x, y); }
    const double* cell(int x, int y) const { return values.data() + cell_offset(x, y); }

    bool same_shape(const FeatureMap& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

}  // namespace mgate
