#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mgate/core/feature_map.hpp"

namespace mgate {

enum class FrameDecision { Static, Moving };

inline const char* to_string(FrameDecision d) {
    return d == FrameDecision::Static ? "static" : "moving";
}

/// Per-cell dissimilarity grid between a background feature map and the
/// current one, computed as 1 - cosine similarity. Values lie in [0, 2];
/// with non-negative (post-ReLU) activations they stay in [0, 1].
struct MotionMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }

    double max_value() const {
        return *std::max_element(values.begin(), values.end());
    }
};

/// Cosine dissimilarity per cell. Cells where both vectors have zero norm
/// report 0 (no activation on either side); cells where exactly one is zero
/// report 1 (activation appeared or vanished).
inline MotionMap compute_motion_map(const FeatureMap& background, const FeatureMap& current) {
    if (!background.same_shape(current))
        throw ShapeError("compute_motion_map: feature map shapes differ");
    if (background.empty())
        throw ShapeError("compute_motion_map: empty feature map");

    MotionMap out;
    out.height = background.height;
    out.width = background.width;
    out.values.resize(static_cast<std::size_t>(out.height) * out.width);

    const int c = background.channels;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double* a = background.cell(x, y);
            const double* b = current.cell(x, y);
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (int k = 0; k < c; ++k) {
                dot += a[k] * b[k];
                na += a[k] * a[k];
                nb += b[k] * b[k];
            }
            double diff;
            if (na == 0.0 && nb == 0.0) {
                diff = 0.0;
            } else if (na == 0.0 || nb == 0.0) {
                diff = 1.0;
            } else {
                double cos_sim = dot / std::sqrt(na * nb);
                diff = 1.0 - std::clamp(cos_sim, -1.0, 1.0);
            }
            out.values[static_cast<std::size_t>(y) * out.width + x] = diff;
        }
    }
    return out;
}

/// Moving iff max(Diff) >= lambda. The complement (max < lambda) is exactly
/// the condition under which the background model may update, so the two
/// rules partition outcomes consistently.
inline FrameDecision gate_frame(const MotionMap& motion, double lambda) {
    if (motion.values.empty())
        throw ShapeError("gate_frame: empty motion map");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("gate_frame: lambda outside [0, 1]");
    return motion.max_value() >= lambda ? FrameDecision::Moving : FrameDecision::Static;
}

}  // namespace mgate
