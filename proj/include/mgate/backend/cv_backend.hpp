#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "json.hpp"
#include "mgate/backend/split_detector.hpp"
#include "mgate/core/errors.hpp"

namespace mgate {

/// Runs an externally supplied frozen-graph detector split into a prefix
/// network (image -> layer-m activations) and a head network (activations ->
/// detections). The split is described by a node-map JSON next to the model
/// files:
///
///   {
///     "model": "name", "layer_count": N,
///     "input": {"height": H, "width": W},
///     "pixel_scale": 0.0039, "score_threshold": 0.0,
///     "full": "full.pb",                      // optional, for consistency checks
///     "splits": {"2": {"prefix": "p.pb", "head": "h.pb"}, ...}
///   }
///
/// Because the head is a separate graph whose input is the feature tensor,
/// running it cannot re-execute prefix layers. Feature grid dimensions are
/// introspected with a dummy forward at load time, never assumed.
class CvSplitDetector final : public SplitDetector {
public:
    CvSplitDetector(const std::string& node_map_path, int split_index) {
        namespace fs = std::filesystem;
        std::ifstream in(node_map_path);
        if (!in)
            throw ConfigError("cannot open node map: " + node_map_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw ConfigError("node map is not valid JSON: " + std::string(e.what()));
        }

        const fs::path base = fs::path(node_map_path).parent_path();
        spec_.layer_count = j.at("layer_count").get<int>();
        spec_.split_index = split_index;
        spec_.input_height = j.at("input").at("height").get<int>();
        spec_.input_width = j.at("input").at("width").get<int>();
        pixel_scale_ = j.value("pixel_scale", 1.0 / 255.0);
        score_threshold_ = j.value("score_threshold", 0.0);

        const auto& splits = j.at("splits");
        const std::string key = std::to_string(split_index);
        if (!splits.contains(key)) {
            std::string avail;
            for (auto it = splits.begin(); it != splits.end(); ++it)
                avail += (avail.empty() ? "" : ", ") + it.key();
            throw ConfigError("node map has no split for m=" + key +
                              " (available: " + avail + ")");
        }
        const auto& entry = splits.at(key);
        prefix_ = load_net(base / entry.at("prefix").get<std::string>());
        head_ = load_net(base / entry.at("head").get<std::string>());
        if (j.contains("full")) {
            full_ = load_net(base / j.at("full").get<std::string>());
            has_full_ = true;
        }

        // Introspect the feature shape the prefix actually emits.
        cv::Mat zero(spec_.input_height, spec_.input_width, CV_8UC3, cv::Scalar(0, 0, 0));
        cv::Mat feat = forward_prefix(zero);
        if (feat.dims != 4 || feat.size[0] != 1)
            throw BackendError("prefix output is not a [1,C,H,W] tensor");
        spec_.grid_channels = feat.size[1];
        spec_.grid_height = feat.size[2];
        spec_.grid_width = feat.size[3];
        spec_.validate();
    }

    FeatureMap extract_features(const Frame& frame) override {
        cv::Mat feat = forward_prefix(to_mat(frame));
        if (feat.dims != 4 || feat.size[1] != spec_.grid_channels ||
            feat.size[2] != spec_.grid_height || feat.size[3] != spec_.grid_width)
            throw BackendError("prefix output shape changed between calls");
        FeatureMap out(spec_.grid_height, spec_.grid_width, spec_.grid_channels);
        const float* src = feat.ptr<float>();
        const int H = out.height, W = out.width, C = out.channels;
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x)
                    out.values[out.cell_offset(x, y) + c] = src[(c * H + y) * W + x];
        return out;
    }

    std::vector<Detection> run_head(const Frame& frame, const FeatureMap& features) override {
        (void)frame;
        if (features.height != spec_.grid_height || features.width != spec_.grid_width ||
            features.channels != spec_.grid_channels)
            throw ShapeError("features do not match the loaded split's grid");
        const int sizes[4] = {1, spec_.grid_channels, spec_.grid_height, spec_.grid_width};
        cv::Mat blob(4, sizes, CV_32F);
        float* dst = blob.ptr<float>();
        const int H = features.height, W = features.width, C = features.channels;
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x)
                    dst[(c * H + y) * W + x] =
                        static_cast<float>(features.values[features.cell_offset(x, y) + c]);
        cv::Mat out;
        try {
            head_.setInput(blob);
            out = head_.forward();
        } catch (const cv::Exception& e) {
            throw BackendError("head forward failed: " + std::string(e.what()));
        }
        return decode(out);
    }

    const SplitDetectorSpec& spec() const override { return spec_; }

    bool has_full_model() const { return has_full_; }

    /// Unsplit end-to-end pass; only for validating split consistency.
    std::vector<Detection> run_full(const Frame& frame) {
        if (!has_full_)
            throw ConfigError("node map declares no full model");
        cv::Mat out;
        try {
            full_.setInput(make_blob(to_mat(frame)));
            out = full_.forward();
        } catch (const cv::Exception& e) {
            throw BackendError("full forward failed: " + std::string(e.what()));
        }
        return decode(out);
    }

private:
    static cv::dnn::Net load_net(const std::filesystem::path& p) {
        if (!std::filesystem::exists(p))
            throw ConfigError("model file not found: " + p.string());
        try {
            return cv::dnn::readNetFromTensorflow(p.string());
        } catch (const cv::Exception& e) {
            throw BackendError("cannot load " + p.string() + ": " + e.what());
        }
    }

    cv::Mat to_mat(const Frame& frame) const {
        if (frame.height != spec_.input_height || frame.width != spec_.input_width)
            throw ShapeError("frame does not match the model input size");
        cv::Mat m(frame.height, frame.width, CV_8UC3);
        std::copy(frame.data.begin(), frame.data.end(), m.ptr<std::uint8_t>());
        return m;
    }

    cv::Mat make_blob(const cv::Mat& img) const {
        return cv::dnn::blobFromImage(img, pixel_scale_,
                                      cv::Size(spec_.input_width, spec_.input_height),
                                      cv::Scalar(), false, false);
    }

    cv::Mat forward_prefix(const cv::Mat& img) {
        try {
            prefix_.setInput(make_blob(img));
            return prefix_.forward().clone();
        } catch (const cv::Exception& e) {
            throw BackendError("prefix forward failed: " + std::string(e.what()));
        }
    }

    /// SSD-style detection output: flat records of
    /// [batch, class, score, left, top, right, bottom]. The importer may
    /// report permuted dims for the final reshape, so decode from flat data.
    std::vector<Detection> decode(const cv::Mat& out) const {
        const std::size_t total = out.total();
        if (total % 7 != 0)
            throw BackendError("detection output size is not a multiple of 7");
        std::vector<Detection> dets;
        const float* r = out.ptr<float>();
        for (std::size_t i = 0; i < total / 7; ++i, r += 7) {
            if (r[2] < score_threshold_) continue;
            Detection d;
            d.class_id = static_cast<int>(r[1]);
            d.score = r[2];
            d.box.left = std::clamp<double>(r[3], 0.0, 1.0);
            d.box.top = std::clamp<double>(r[4], 0.0, 1.0);
            d.box.right = std::clamp<double>(r[5], 0.0, 1.0);
            d.box.bottom = std::clamp<double>(r[6], 0.0, 1.0);
            if (d.box.left >= d.box.right || d.box.top >= d.box.bottom) continue;
            dets.push_back(d);
        }
        return dets;
    }

    SplitDetectorSpec spec_;
    cv::dnn::Net prefix_, head_, full_;
    bool has_full_ = false;
    double pixel_scale_ = 1.0 / 255.0;
    double score_threshold_ = 0.0;
};

}  // namespace mgate
