#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgate/eval/measure.hpp"
#include "mgate/util/rng.hpp"

namespace mgate {

inline const char* to_string(ApInterpolation i) {
    return i == ApInterpolation::AllPoint ? "all-point" : "11-point";
}

namespace detail {
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

/// Canonical config string; its FNV-1a hash makes every emitted row
/// self-describing.
inline std::string config_signature(const EvalReport& r) {
    std::ostringstream s;
    s << r.backend << '|' << r.mode << '|' << r.layer_index << '|'
      << detail::fmt(r.lambda_gate) << '|' << detail::fmt(r.lambda_filter) << '|'
      << detail::fmt(r.alpha) << '|' << detail::fmt(r.baseline_threshold) << '|' << r.seed << '|'
      << detail::fmt(r.iou_threshold) << '|' << to_string(r.interp) << '|' << r.label;
    return s.str();
}

inline std::uint64_t compute_config_hash(const EvalReport& r) {
    const std::string sig = config_signature(r);
    return fnv1a64(sig.data(), sig.size());
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["label"] = r.label;
    j["backend"] = r.backend;
    j["mode"] = r.mode;
    j["config"] = {{"m", r.layer_index},
                   {"lambda_gate", r.lambda_gate},
                   {"lambda_filter", r.lambda_filter},
                   {"alpha", r.alpha},
                   {"seed", r.seed}};
    if (r.mode == "baseline")
        j["config"]["baseline_threshold"] = r.baseline_threshold;
    j["map"] = std::isnan(r.map) ? nlohmann::json() : nlohmann::json(r.map);
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : r.per_class) {
        nlohmann::json e;
        e["class_id"] = c.class_id;
        e["ap"] = std::isnan(c.ap) ? nlohmann::json() : nlohmann::json(c.ap);
        e["gt_count"] = c.gt_count;
        e["det_count"] = c.det_count;
        e["tp"] = c.tp;
        e["fp"] = c.fp;
        classes.push_back(e);
    }
    j["per_class"] = classes;
    nlohmann::json per_seq = nlohmann::json::object();
    for (const auto& [name, map] : r.per_sequence_map)
        per_seq[name] = std::isnan(map) ? nlohmann::json() : nlohmann::json(map);
    j["per_sequence_map"] = per_seq;
    j["frames"] = r.frames;
    j["head_invocations"] = r.head_invocations;
    j["moving_frames"] = r.moving_frames;
    j["head_fraction"] = r.head_fraction;
    j["timing"] = {{"mean_frame_us", r.mean_frame_us},
                   {"median_frame_us", r.median_frame_us},
                   {"mean_extract_us", r.mean_stage_us.extract_us},
                   {"mean_gate_us", r.mean_stage_us.gate_us},
                   {"mean_head_us", r.mean_stage_us.head_us},
                   {"mean_filter_us", r.mean_stage_us.filter_us},
                   {"timed_frames", r.timed_frames},
                   {"parallel_load", r.parallel_load}};
    j["scoring"] = {{"iou_threshold", r.iou_threshold}, {"interpolation", to_string(r.interp)}};
    j["config_hash"] = r.config_hash;
    return j;
}

inline void write_report_json(const std::string& path, const EvalReport& r) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write report: " + path);
    out << report_to_json(r).dump(2) << "\n";
}

inline std::string csv_header() {
    return "label,backend,mode,m,lambda_gate,lambda_filter,alpha,baseline_threshold,seed,"
           "map,frames,head_invocations,moving_frames,head_fraction,"
           "mean_frame_us,median_frame_us,mean_extract_us,mean_gate_us,mean_head_us,"
           "mean_filter_us,timed_frames,iou_threshold,interpolation,parallel_load,config_hash";
}

inline std::string csv_row(const EvalReport& r) {
    std::ostringstream s;
    std::string label = r.label;
    for (auto& ch : label)
        if (ch == ',') ch = ';';
    s << label << ',' << r.backend << ',' << r.mode << ','
      << r.layer_index << ',' << r.lambda_gate << ',' << r.lambda_filter << ',' << r.alpha << ','
      << r.baseline_threshold << ',' << r.seed << ',' << r.map << ',' << r.frames << ','
      << r.head_invocations << ',' << r.moving_frames << ',' << r.head_fraction << ','
      << r.mean_frame_us << ',' << r.median_frame_us << ',' << r.mean_stage_us.extract_us << ','
      << r.mean_stage_us.gate_us << ',' << r.mean_stage_us.head_us << ','
      << r.mean_stage_us.filter_us << ',' << r.timed_frames << ',' << r.iou_threshold << ','
      << to_string(r.interp) << ',' << (r.parallel_load ? 1 : 0) << ',' << r.config_hash;
    return s.str();
}

inline void write_trace_csv(const std::string& path, const std::vector<FrameTrace>& trace) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace: " + path);
    out << "frame,decision,motion_max,detections,total_us\n";
    for (const auto& t : trace)
        out << t.index << ',' << to_string(t.decision) << ',' << t.motion_max << ','
            << t.detections << ',' << t.total_us << "\n";
}

/// Matrix CSV: first column holds row labels, header row holds column labels.
inline void write_matrix_csv(const std::string& path, const std::string& corner,
                             const std::vector<double>& row_labels,
                             const std::vector<double>& col_labels,
                             const std::vector<std::vector<double>>& values) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write matrix: " + path);
    out << corner;
    for (double c : col_labels) out << ',' << c;
    out << "\n";
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        out << row_labels[i];
        for (std::size_t k = 0; k < col_labels.size(); ++k) out << ',' << values[i][k];
        out << "\n";
    }
}

namespace detail {
// three-stop color ramp, dark violet -> teal -> yellow
inline void ramp(double t, int& rr, int& gg, int& bb) {
    const double stops[3][3] = {{0.27, 0.00, 0.33}, {0.13, 0.57, 0.55}, {0.99, 0.91, 0.14}};
    t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
    const double pos = t * 2.0;
    const int lo = pos < 1.0 ? 0 : 1;
    const double f = pos - lo;
    rr = static_cast<int>(255 * (stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])));
    gg = static_cast<int>(255 * (stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])));
    bb = static_cast<int>(255 * (stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
}
}  // namespace detail

/// Static vector-graphic heatmap of a value matrix, NaN cells gray.
inline void write_heatmap_svg(const std::string& path, const std::string& title,
                              const std::string& row_name, const std::string& col_name,
                              const std::vector<double>& row_labels,
                              const std::vector<double>& col_labels,
                              const std::vector<std::vector<double>>& values, double vmin,
                              double vmax) {
    const int cell = 46, pad_l = 70, pad_t = 56, pad_b = 46, pad_r = 16;
    const int rows = static_cast<int>(row_labels.size());
    const int cols = static_cast<int>(col_labels.size());
    const int w = pad_l + cols * cell + pad_r;
    const int h = pad_t + rows * cell + pad_b;
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write heatmap: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
        << "' font-family='monospace' font-size='11'>\n";
    out << "<text x='" << pad_l << "' y='20' font-size='14'>" << title << "</text>\n";
    out << "<text x='8' y='" << (pad_t + rows * cell / 2) << "'>" << row_name << "</text>\n";
    out << "<text x='" << (pad_l + cols * cell / 2 - 10) << "' y='" << (h - 12) << "'>" << col_name
        << "</text>\n";
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    for (int i = 0; i < rows; ++i) {
        out << "<text x='" << (pad_l - 36) << "' y='" << (pad_t + i * cell + cell / 2 + 4) << "'>"
            << row_labels[i] << "</text>\n";
        for (int k = 0; k < cols; ++k) {
            const double v = values[i][k];
            std::string fill = "#9e9e9e";
            if (!std::isnan(v)) {
                int rr, gg, bb;
                detail::ramp((v - vmin) / span, rr, gg, bb);
                char buf[10];
                std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rr, gg, bb);
                fill = buf;
            }
            out << "<rect x='" << (pad_l + k * cell) << "' y='" << (pad_t + i * cell) << "' width='"
                << cell << "' height='" << cell << "' fill='" << fill
                << "' stroke='#222' stroke-width='0.5'/>\n";
            char label[16];
            if (std::isnan(v))
                std::snprintf(label, sizeof(label), "-");
            else
                std::snprintf(label, sizeof(label), "%.2f", v);
            out << "<text x='" << (pad_l + k * cell + 6) << "' y='"
                << (pad_t + i * cell + cell / 2 + 4) << "' fill='#ffffff'>" << label
                << "</text>\n";
        }
    }
    for (int k = 0; k < cols; ++k)
        out << "<text x='" << (pad_l + k * cell + 6) << "' y='" << (pad_t - 8) << "'>"
            << col_labels[k] << "</text>\n";
    out << "</svg>\n";
}

}  // namespace mgate
