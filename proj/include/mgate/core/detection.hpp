#pragma once

#include "mgate/core/geometry.hpp"

namespace mgate {

/// One detector output: a normalized box with a class label and confidence.
struct Detection {
    NormalizedBox box;
    int class_id = 0;
    double score = 0.0;
};

}  // namespace mgate
