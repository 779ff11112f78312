#pragma once

#include "mgate/core/detection.hpp"
#include "mgate/core/geometry.hpp"

namespace mgate {

struct GroundTruthBox {
    NormalizedBox box;
    int class_id = 1;
    int frame_index = 0;
};

/// A detection tagged with the frame it came from, the unit of MAP scoring.
struct EvalDetection {
    NormalizedBox box;
    int class_id = 0;
    double score = 0.0;
    int frame_index = 0;
};

inline EvalDetection tag_detection(const Detection& d, int frame_index) {
    return EvalDetection{d.box, d.class_id, d.score, frame_index};
}

}  // namespace mgate
