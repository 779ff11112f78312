#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mgate/core/pipeline.hpp"
#include "mgate/dataset/source.hpp"
#include "mgate/eval/average_precision.hpp"
#include "mgate/eval/ground_truth.hpp"

namespace mgate {

struct FrameTrace {
    int index = 0;
    FrameDecision decision = FrameDecision::Static;
    double motion_max = 0.0;
    int detections = 0;
    double total_us = 0.0;
};

struct MeasureConfig {
    double iou_threshold = 0.5;
    ApInterpolation interp = ApInterpolation::AllPoint;
    int warmup_frames = 10;    // excluded from timing statistics, still scored
    int eval_class = -1;       // -1 = score all classes
    int reference_frame = -1;  // -1 = background auto-seeds from frame 0
    bool keep_trace = true;
};

struct SequenceMeasurement {
    std::string sequence;
    std::vector<EvalDetection> detections;     // survivors within the ROI
    std::vector<GroundTruthBox> ground_truth;  // ROI frames only
    long frames = 0;
    long head_invocations = 0;
    long moving_frames = 0;
    StageTimings stage_sums;              // over timed (post-warm-up) frames
    std::vector<double> frame_times_us;   // per timed frame
    std::vector<FrameTrace> trace;
    ApResult ap;
};

/// Runs a gated pipeline over one sequence stream, collecting surviving
/// detections, ground truth inside the temporal ROI, per-stage wall-clock
/// sums, and a per-frame audit trace. Works for any pipeline exposing
/// initialize/process_frame (feature-gated and pixel-gated alike).
template <typename PipelineT>
SequenceMeasurement measure_pipeline(PipelineT& pipeline, SequenceSource& source,
                                     const MeasureConfig& cfg) {
    SequenceMeasurement out;
    out.sequence = source.name();

    if (cfg.reference_frame >= 0) {
        SequenceItem item;
        bool found = false;
        while (source.next(item)) {
            if (item.index == cfg.reference_frame) {
                pipeline.initialize(item.frame);
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("reference frame " + std::to_string(cfg.reference_frame) +
                              " beyond sequence end");
        source.reset();
    }

    SequenceItem item;
    while (source.next(item)) {
        FrameResult result;
        try {
            result = pipeline.process_frame(item.frame);
        } catch (const BackendError& e) {
            throw BackendError("frame " + std::to_string(item.index) + ": " + e.what());
        }
        ++out.frames;
        if (result.head_invoked)
            ++out.head_invocations;
        if (result.decision == FrameDecision::Moving)
            ++out.moving_frames;

        if (out.frames > cfg.warmup_frames) {
            out.stage_sums.extract_us += result.timings.extract_us;
            out.stage_sums.gate_us += result.timings.gate_us;
            out.stage_sums.head_us += result.timings.head_us;
            out.stage_sums.filter_us += result.timings.filter_us;
            out.frame_times_us.push_back(result.timings.total_us());
        }
        if (cfg.keep_trace)
            out.trace.push_back(FrameTrace{item.index, result.decision, result.motion_max,
                                           static_cast<int>(result.detections.size()),
                                           result.timings.total_us()});

        if (item.has_ground_truth) {
            for (const auto& d : result.detections)
                if (cfg.eval_class < 0 || d.class_id == cfg.eval_class)
                    out.detections.push_back(tag_detection(d, item.index));
            for (const auto& g : item.boxes)
                if (cfg.eval_class < 0 || g.class_id == cfg.eval_class)
                    out.ground_truth.push_back(g);
        }
    }
    out.ap = match_and_score(out.detections, out.ground_truth, cfg.iou_threshold, cfg.interp);
    return out;
}

struct EvalReport {
    std::string label;          // sequence name or "pooled"
    std::string backend;        // config echo
    std::string mode = "gated";  // gated | baseline | raw
    int layer_index = 0;
    double lambda_gate = 0.0;
    double lambda_filter = 0.0;
    double alpha = 0.0;
    double baseline_threshold = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;

    double map = std::numeric_limits<double>::quiet_NaN();
    std::vector<ClassAp> per_class;
    std::vector<std::pair<std::string, double>> per_sequence_map;

    long frames = 0;
    long head_invocations = 0;
    long moving_frames = 0;
    double head_fraction = 0.0;
    double mean_frame_us = 0.0;
    double median_frame_us = 0.0;
    StageTimings mean_stage_us;
    int timed_frames = 0;

    double iou_threshold = 0.5;
    ApInterpolation interp = ApInterpolation::AllPoint;
    bool parallel_load = false;  // true when other workers ran during timing
    std::uint64_t config_hash = 0;
};

/// Pools several per-sequence measurements into one report: detections form
/// a single ranked list (frame indices offset per sequence so frames never
/// collide), and per-sequence MAPs ride along.
inline EvalReport aggregate_measurements(const std::vector<SequenceMeasurement>& runs,
                                         const MeasureConfig& cfg) {
    EvalReport r;
    r.iou_threshold = cfg.iou_threshold;
    r.interp = cfg.interp;

    std::vector<EvalDetection> pooled_dets;
    std::vector<GroundTruthBox> pooled_gt;
    int frame_base = 0;
    std::vector<double> all_times;
    for (const auto& m : runs) {
        for (auto d : m.detections) {
            d.frame_index += frame_base;
            pooled_dets.push_back(d);
        }
        for (auto g : m.ground_truth) {
            g.frame_index += frame_base;
            pooled_gt.push_back(g);
        }
        int max_idx = 0;
        for (const auto& t : m.trace) max_idx = std::max(max_idx, t.index);
        frame_base += std::max<int>(static_cast<int>(m.frames), max_idx + 1);

        r.frames += m.frames;
        r.head_invocations += m.head_invocations;
        r.moving_frames += m.moving_frames;
        r.mean_stage_us.extract_us += m.stage_sums.extract_us;
        r.mean_stage_us.gate_us += m.stage_sums.gate_us;
        r.mean_stage_us.head_us += m.stage_sums.head_us;
        r.mean_stage_us.filter_us += m.stage_sums.filter_us;
        all_times.insert(all_times.end(), m.frame_times_us.begin(), m.frame_times_us.end());
        r.per_sequence_map.emplace_back(m.sequence, m.ap.map);
    }
    r.label = runs.size() == 1 ? runs.front().sequence : "pooled";

    const ApResult pooled = match_and_score(pooled_dets, pooled_gt, cfg.iou_threshold, cfg.interp);
    r.map = pooled.map;
    r.per_class = pooled.per_class;

    r.timed_frames = static_cast<int>(all_times.size());
    if (r.frames > 0)
        r.head_fraction = static_cast<double>(r.head_invocations) / static_cast<double>(r.frames);
    if (!all_times.empty()) {
        double sum = 0.0;
        for (double t : all_times) sum += t;
        r.mean_frame_us = sum / all_times.size();
        std::vector<double> sorted = all_times;
        const std::size_t mid = sorted.size() / 2;
        std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
        r.median_frame_us = sorted[mid];
        if (sorted.size() % 2 == 0) {
            const double hi = sorted[mid];
            std::nth_element(sorted.begin(), sorted.begin() + mid - 1, sorted.end());
            r.median_frame_us = (sorted[mid - 1] + hi) / 2.0;
        }
        const double n = static_cast<double>(all_times.size());
        r.mean_stage_us.extract_us /= n;
        r.mean_stage_us.gate_us /= n;
        r.mean_stage_us.head_us /= n;
        r.mean_stage_us.filter_us /= n;
    }
    return r;
}

}  // namespace mgate
