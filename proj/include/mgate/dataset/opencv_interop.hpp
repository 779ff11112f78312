#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "mgate/core/errors.hpp"
#include "mgate/core/image.hpp"

namespace mgate {

inline Frame from_mat(const cv::Mat& m) {
    if (m.empty() || m.type() != CV_8UC3 || !m.isContinuous())
        throw ShapeError("from_mat: expected continuous 8UC3 image");
    Frame f(m.rows, m.cols);
    std::copy(m.ptr<std::uint8_t>(), m.ptr<std::uint8_t>() + f.data.size(), f.data.begin());
    return f;
}

inline cv::Mat to_mat(const Frame& f) {
    cv::Mat m(f.height, f.width, CV_8UC3);
    std::copy(f.data.begin(), f.data.end(), m.ptr<std::uint8_t>());
    return m;
}

/// Decodes a color image, optionally resizing (bilinear) to target dims.
inline Frame imread_frame(const std::string& path, int target_h = 0, int target_w = 0) {
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty())
        throw std::runtime_error("cannot read image: " + path);
    if (target_h > 0 && target_w > 0 && (m.rows != target_h || m.cols != target_w))
        cv::resize(m, m, cv::Size(target_w, target_h), 0, 0, cv::INTER_LINEAR);
    if (!m.isContinuous())
        m = m.clone();
    return from_mat(m);
}

/// Decodes a grayscale label mask at native resolution.
inline std::vector<std::uint8_t> imread_mask(const std::string& path, int& height, int& width) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty())
        throw std::runtime_error("cannot read mask: " + path);
    if (!m.isContinuous())
        m = m.clone();
    height = m.rows;
    width = m.cols;
    return std::vector<std::uint8_t>(m.ptr<std::uint8_t>(), m.ptr<std::uint8_t>() + m.total());
}

/// Decodes a patch image; a 4th channel, when present, is split into alpha.
inline Frame imread_patch(const std::string& path, std::vector<std::uint8_t>& alpha) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty())
        throw std::runtime_error("cannot read patch: " + path);
    alpha.clear();
    if (m.channels() == 4) {
        std::vector<cv::Mat> ch;
        cv::split(m, ch);
        cv::Mat a = ch[3].clone();
        alpha.assign(a.ptr<std::uint8_t>(), a.ptr<std::uint8_t>() + a.total());
        cv::merge(std::vector<cv::Mat>{ch[0], ch[1], ch[2]}, m);
    } else if (m.channels() == 1) {
        cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
    }
    if (!m.isContinuous())
        m = m.clone();
    return from_mat(m);
}

inline void imwrite_frame(const std::string& path, const Frame& f) {
    if (!cv::imwrite(path, to_mat(f)))
        throw std::runtime_error("cannot write image: " + path);
}

}  // namespace mgate
