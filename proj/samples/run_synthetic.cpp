// Measures gated vs raw on a noisy synthetic sequence with a static
// distractor, printing the MAP and cost numbers side by side.
#include <cstdio>

#include "mgate/backend/mock_backend.hpp"
#include "mgate/core/pipeline.hpp"
#include "mgate/dataset/source.hpp"
#include "mgate/eval/measure.hpp"

using namespace mgate;

namespace {

SyntheticConfig make_scene() {
    // chromatic palette: the gate scores color direction, not brightness,
    // so the blob has to differ from the background in hue
    SyntheticConfig scene;
    scene.height = 96;
    scene.width = 96;
    scene.frame_count = 150;
    scene.bg_b = 64;
    scene.bg_g = 8;
    scene.bg_r = 8;
    BlobSpec blob;
    blob.start_frame = 30;
    blob.end_frame = 90;
    blob.x = 0;
    blob.y = 40;
    blob.width = 16;
    blob.height = 16;
    blob.dx = 1;
    blob.b = 64;
    blob.g = 255;
    blob.r = 255;
    scene.blobs.push_back(blob);
    return scene;
}

std::unique_ptr<SequenceSource> make_source() {
    // opaque bright patch that never moves: draws canned-style false
    // positives out of the blob head every frame
    Frame patch = Frame::solid(12, 12, 128, 255, 240);
    DistractorOverlay overlay(patch, {}, NormalizedBox{0.7, 0.1, 0.85, 0.25}, 0);
    NoiseConfig noise;
    noise.mu = 0.95;
    noise.sigma = 0.03;
    noise.seed = 7;
    return std::make_unique<AugmentingSource>(std::make_unique<SyntheticSource>(make_scene()),
                                              overlay, noise);
}

void show(const char* name, const EvalReport& r) {
    std::printf("%-6s map %.4f  head %5.1f%%  mean %8.1f us\n", name,
                r.map, 100.0 * r.head_fraction, r.mean_frame_us);
}

}  // namespace

int main() {
    MockConfig mock;
    mock.block = 8;
    mock.blob_threshold = 170.0;
    mock.extract_delay = std::chrono::microseconds(200);
    mock.head_delay = std::chrono::microseconds(1000);

    MeasureConfig measure;
    measure.warmup_frames = 5;

    GateConfig gate;
    gate.layer_index = 1;
    gate.lambda_gate = 0.05;
    gate.lambda_filter = 0.05;
    gate.alpha = 0.9;

    {
        MockDetector detector(96, 96, mock);
        Pipeline pipeline(detector, gate);
        auto source = make_source();
        auto m = measure_pipeline(pipeline, *source, measure);
        EvalReport r = aggregate_measurements({m}, measure);
        show("gated", r);
    }
    {
        MockDetector detector(96, 96, mock);
        RawPipeline pipeline(detector);
        auto source = make_source();
        auto m = measure_pipeline(pipeline, *source, measure);
        EvalReport r = aggregate_measurements({m}, measure);
        show("raw", r);
    }
    return 0;
}
