#pragma once

#include <stdexcept>

#include "mgate/core/feature_map.hpp"

namespace mgate {

/// Feature-space background model: an exponential moving average over the
/// feature maps of frames classified as static.
///
/// alpha = 1 freezes the model at its reference frame; alpha = 0 makes every
/// frame compare against the previous one. Map dimensions are fixed once the
/// model is initialized.
class BackgroundModel {
public:
    explicit BackgroundModel(double alpha) : alpha_(alpha) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("BackgroundModel: alpha outside [0, 1]");
    }

    bool initialized() const { return initialized_; }
    double alpha() const { return alpha_; }

    const FeatureMap& map() const {
        if (!initialized_)
            throw std::logic_error("BackgroundModel: not initialized");
        return map_;
    }

    /// Adopts the reference frame's feature map. The reference frame should
    /// not contain moving objects, or their start positions will read as
    /// motion later.
    void initialize(const FeatureMap& reference) {
        if (initialized_)
            throw std::logic_error("BackgroundModel: already initialized");
        if (reference.empty())
            throw ShapeError("BackgroundModel: empty reference map");
        map_ = reference;
        initialized_ = true;
    }

    /// EMA update toward `current`, applied only when motion_max < lambda
    /// (strictly); frames with motion keep the model frozen.
    void update(const FeatureMap& current, double motion_max, double lambda) {
        if (!initialized_)
            throw std::logic_error("BackgroundModel: update before initialize");
        if (!map_.same_shape(current))
            throw ShapeError("BackgroundModel: update with mismatched shape");
        if (!(motion_max < lambda))
            return;
        if (alpha_ == 1.0)
            return;  // frozen reference, bitwise unchanged
        if (alpha_ == 0.0) {
            map_.values = current.values;  // track the previous frame exactly
            return;
        }
        const double beta = 1.0 - alpha_;
        for (std::size_t i = 0; i < map_.values.size(); ++i)
            map_.values[i] = alpha_ * map_.values[i] + beta * current.values[i];
    }

private:
    FeatureMap map_;
    double alpha_;
    bool initialized_ = false;
};

}  // namespace mgate
