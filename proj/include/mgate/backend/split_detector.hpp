#pragma once

#include <vector>

#include "mgate/core/detection.hpp"
#include "mgate/core/errors.hpp"
#include "mgate/core/feature_map.hpp"
#include "mgate/core/image.hpp"

namespace mgate {

/// Static description of a detector split into a feature extractor
/// (layers 1..m) and a detection head (layers m+1..N).
struct SplitDetectorSpec {
    int layer_count = 0;   // N
    int split_index = 0;   // m
    int input_height = 0;
    int input_width = 0;
    int grid_height = 0;   // H_m x W_m x C_m emitted at layer m
    int grid_width = 0;
    int grid_channels = 0;

    void validate() const {
        if (layer_count < 1)
            throw ConfigError("SplitDetectorSpec: layer_count must be >= 1");
        if (split_index < 1 || split_index > layer_count)
            throw ConfigError("SplitDetectorSpec: split_index out of range [1, N]");
        if (input_height < 1 || input_width < 1)
            throw ConfigError("SplitDetectorSpec: input dimensions must be >= 1");
        if (grid_height < 1 || grid_width < 1 || grid_channels < 1)
            throw ConfigError("SplitDetectorSpec: grid dimensions must be >= 1");
    }
};

/// Detector whose forward pass is split at layer m. extract_features runs the
/// prefix; run_head runs the remainder from the cached activations and must
/// never re-execute the prefix.
class SplitDetector {
public:
    virtual ~SplitDetector() = default;

    virtual FeatureMap extract_features(const Frame& frame) = 0;
    virtual std::vector<Detection> run_head(const Frame& frame, const FeatureMap& features) = 0;
    virtual const SplitDetectorSpec& spec() const = 0;
};

}  // namespace mgate
