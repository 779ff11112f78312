#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mgate/core/errors.hpp"
#include "mgate/core/geometry.hpp"
#include "mgate/core/image.hpp"
#include "mgate/util/rng.hpp"

namespace mgate {

struct NoiseConfig {
    double mu = 0.8;
    double sigma = 0.2;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(sigma >= 0.0))
            throw ConfigError("NoiseConfig: sigma must be >= 0");
    }
};

/// Multiplies every channel of every pixel by an independent draw from
/// Normal(mu, sigma^2), rounds half-to-even, clamps to [0, 255]. The RNG
/// stream is derived from (seed, frame_index), so results do not depend on
/// processing order.
inline Frame apply_noise(const Frame& frame, const NoiseConfig& cfg, int frame_index) {
    cfg.validate();
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(frame_index)));
    std::normal_distribution<double> gauss(cfg.mu, cfg.sigma);
    Frame out = frame;
    for (auto& v : out.data) {
        const double scaled = static_cast<double>(v) * gauss(rng);
        v = static_cast<std::uint8_t>(std::clamp(std::nearbyint(scaled), 0.0, 255.0));
    }
    return out;
}

/// Static image patch composited into a fixed frame region from a start
/// frame onward. The patch is rescaled once to the placement rect; an
/// optional alpha mask enables blending, otherwise the composite is opaque.
class DistractorOverlay {
public:
    /// patch: source image; alpha: same dims as patch, empty = opaque.
    DistractorOverlay(const Frame& patch, std::vector<std::uint8_t> alpha,
                      const NormalizedBox& placement, int start_frame = 0)
        : placement_(placement), start_frame_(start_frame) {
        if (!placement.valid())
            throw ConfigError("DistractorOverlay: invalid placement box");
        if (!alpha.empty() &&
            alpha.size() != static_cast<std::size_t>(patch.height) * patch.width)
            throw ShapeError("DistractorOverlay: alpha dims do not match patch");
        patch_ = patch;
        alpha_ = std::move(alpha);
    }

    int start_frame() const { return start_frame_; }
    const NormalizedBox& placement() const { return placement_; }

    /// Composites unconditionally; callers gate on start_frame.
    Frame apply(const Frame& frame) const {
        GridRect rect = map_box_to_grid(placement_, frame.height, frame.width);
        Frame out = frame;
        const int rw = rect.width(), rh = rect.height();
        for (int y = 0; y < rh; ++y) {
            // nearest-neighbor patch sampling; fidelity is not metric-bearing
            const int py = std::min(patch_.height - 1, y * patch_.height / rh);
            for (int x = 0; x < rw; ++x) {
                const int px = std::min(patch_.width - 1, x * patch_.width / rw);
                const std::uint8_t* src = patch_.pixel(px, py);
                std::uint8_t* dst = out.pixel(rect.left + x, rect.top + y);
                if (alpha_.empty()) {
                    dst[0] = src[0];
                    dst[1] = src[1];
                    dst[2] = src[2];
                } else {
                    const double a = alpha_[static_cast<std::size_t>(py) * patch_.width + px] / 255.0;
                    for (int c = 0; c < 3; ++c)
                        dst[c] = static_cast<std::uint8_t>(
                            std::clamp(std::nearbyint(a * src[c] + (1.0 - a) * dst[c]), 0.0, 255.0));
                }
            }
        }
        return out;
    }

private:
    Frame patch_;
    std::vector<std::uint8_t> alpha_;
    NormalizedBox placement_;
    int start_frame_;
};

}  // namespace mgate
