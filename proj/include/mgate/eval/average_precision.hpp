#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "mgate/eval/ground_truth.hpp"
#include "mgate/eval/iou.hpp"

namespace mgate {

enum class ApInterpolation { AllPoint, ElevenPoint };

struct ClassAp {
    int class_id = 0;
    double ap = std::numeric_limits<double>::quiet_NaN();  // NaN = undefined (no ground truth)
    int gt_count = 0;
    int det_count = 0;
    int tp = 0;
    int fp = 0;
};

struct ApResult {
    std::vector<ClassAp> per_class;
    double map = std::numeric_limits<double>::quiet_NaN();
    int classes_evaluated = 0;

    const ClassAp* find_class(int class_id) const {
        for (const auto& c : per_class)
            if (c.class_id == class_id) return &c;
        return nullptr;
    }
};

/// Area under the precision-recall curve. AllPoint integrates the running
/// maximum of precision over recall; ElevenPoint averages interpolated
/// precision at recalls {0, 0.1, ..., 1.0}.
inline double ap_from_curve(const std::vector<double>& recall, const std::vector<double>& precision,
                            ApInterpolation interp) {
    if (recall.empty())
        return 0.0;
    if (interp == ApInterpolation::ElevenPoint) {
        double sum = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double r = i / 10.0;
            double best = 0.0;
            for (std::size_t k = 0; k < recall.size(); ++k)
                if (recall[k] >= r)
                    best = std::max(best, precision[k]);
            sum += best;
        }
        return sum / 11.0;
    }
    std::vector<double> mrec, mpre;
    mrec.reserve(recall.size() + 2);
    mpre.reserve(recall.size() + 2);
    mrec.push_back(0.0);
    mpre.push_back(0.0);
    mrec.insert(mrec.end(), recall.begin(), recall.end());
    mpre.insert(mpre.end(), precision.begin(), precision.end());
    mrec.push_back(1.0);
    mpre.push_back(0.0);
    for (std::size_t i = mpre.size() - 1; i-- > 0;)
        mpre[i] = std::max(mpre[i], mpre[i + 1]);
    double ap = 0.0;
    for (std::size_t i = 0; i + 1 < mrec.size(); ++i)
        if (mrec[i + 1] != mrec[i])
            ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1];
    return ap;
}

/// PASCAL VOC-style scoring. Per class: detections sorted by descending
/// score (ties keep input order), each matched greedily to the unmatched
/// ground-truth box of highest IoU >= threshold within its frame. Classes
/// absent from the ground truth keep an undefined (NaN) AP and are excluded
/// from the mean.
inline ApResult match_and_score(const std::vector<EvalDetection>& detections,
                                const std::vector<GroundTruthBox>& ground_truth,
                                double iou_threshold,
                                ApInterpolation interp = ApInterpolation::AllPoint) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        throw std::invalid_argument("match_and_score: iou_threshold outside (0, 1)");

    std::set<int> classes;
    for (const auto& g : ground_truth) classes.insert(g.class_id);
    for (const auto& d : detections) classes.insert(d.class_id);

    ApResult result;
    double ap_sum = 0.0;
    for (int cls : classes) {
        ClassAp entry;
        entry.class_id = cls;

        // frame -> indices into `ground_truth` for this class
        std::map<int, std::vector<std::size_t>> gt_by_frame;
        for (std::size_t i = 0; i < ground_truth.size(); ++i) {
            if (ground_truth[i].class_id != cls) continue;
            gt_by_frame[ground_truth[i].frame_index].push_back(i);
            ++entry.gt_count;
        }

        std::vector<const EvalDetection*> dets;
        for (const auto& d : detections)
            if (d.class_id == cls) dets.push_back(&d);
        entry.det_count = static_cast<int>(dets.size());
        std::stable_sort(dets.begin(), dets.end(),
                         [](const EvalDetection* a, const EvalDetection* b) {
                             return a->score > b->score;
                         });

        if (entry.gt_count == 0) {
            entry.fp = entry.det_count;
            result.per_class.push_back(entry);
            continue;  // AP undefined, excluded from the mean
        }

        std::vector<char> matched(ground_truth.size(), 0);
        std::vector<double> recall, precision;
        recall.reserve(dets.size());
        precision.reserve(dets.size());
        int tp = 0, fp = 0;
        for (const EvalDetection* d : dets) {
            double best_iou = 0.0;
            std::size_t best_idx = 0;
            bool found = false;
            auto it = gt_by_frame.find(d->frame_index);
            if (it != gt_by_frame.end()) {
                for (std::size_t gi : it->second) {
                    if (matched[gi]) continue;
                    const double v = iou(d->box, ground_truth[gi].box);
                    if (v > best_iou) {
                        best_iou = v;
                        best_idx = gi;
                        found = true;
                    }
                }
            }
            if (found && best_iou >= iou_threshold) {
                matched[best_idx] = 1;
                ++tp;
            } else {
                ++fp;
            }
            recall.push_back(static_cast<double>(tp) / entry.gt_count);
            precision.push_back(static_cast<double>(tp) / (tp + fp));
        }
        entry.tp = tp;
        entry.fp = fp;
        entry.ap = ap_from_curve(recall, precision, interp);
        ap_sum += entry.ap;
        ++result.classes_evaluated;
        result.per_class.push_back(entry);
    }
    if (result.classes_evaluated > 0)
        result.map = ap_sum / result.classes_evaluated;
    return result;
}

}  // namespace mgate
