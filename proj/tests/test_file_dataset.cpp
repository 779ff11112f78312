#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mgate/dataset/file_source.hpp"
#include "mgate/dataset/manifest.hpp"
#include "mgate/dataset/opencv_interop.hpp"

using namespace mgate;
namespace fs = std::filesystem;

namespace {

// CDNet-style tree: 6 solid-color frames, 64x64 masks holding one genuine
// motion rectangle plus an unknown-label rectangle, ROI frames 3..6 (1-based)
std::string make_cdnet_tree(const std::string& name) {
    const fs::path root = fs::path(testing::TempDir()) / name;
    fs::create_directories(root / "input");
    fs::create_directories(root / "groundtruth");
    char buf[32];
    for (int i = 1; i <= 6; ++i) {
        cv::Mat img(32, 32, CV_8UC3, cv::Scalar(i * 10, i * 10 + 1, i * 10 + 2));
        std::snprintf(buf, sizeof(buf), "in%06d.png", i);
        cv::imwrite((root / "input" / buf).string(), img);

        cv::Mat mask(64, 64, CV_8UC1, cv::Scalar(0));
        cv::rectangle(mask, cv::Rect(8, 8, 16, 16), cv::Scalar(255), cv::FILLED);
        cv::rectangle(mask, cv::Rect(40, 40, 10, 10), cv::Scalar(170), cv::FILLED);
        std::snprintf(buf, sizeof(buf), "gt%06d.png", i);
        cv::imwrite((root / "groundtruth" / buf).string(), mask);
    }
    std::ofstream(root / "temporalROI.txt") << "3 6\n";
    return root.string();
}

}  // namespace

TEST(CdnetScan, LayoutAndRoi) {
    const std::string dir = make_cdnet_tree("cdnet_scan");
    auto m = scan_cdnet_sequence(dir);
    EXPECT_EQ(m.name, "cdnet_scan");
    EXPECT_EQ(m.frame_paths.size(), 6u);
    EXPECT_EQ(m.mask_paths.size(), 6u);
    EXPECT_EQ(m.gt_kind, GroundTruthKind::MaskDir);
    EXPECT_EQ(m.roi_first, 2);  // 1-based "3 6" becomes 0-based [2, 5]
    EXPECT_EQ(m.roi_last, 5);
    EXPECT_NE(m.frame_paths[0].find("in000001"), std::string::npos);
    EXPECT_NE(m.frame_paths[5].find("in000006"), std::string::npos);

    // directory dispatch picks the scanner
    auto via_dispatch = load_manifest(dir);
    EXPECT_EQ(via_dispatch.frame_paths, m.frame_paths);
}

TEST(FileSource, StreamsResizedFramesWithMaskBoxes) {
    const std::string dir = make_cdnet_tree("cdnet_stream");
    FileSequenceSource src(scan_cdnet_sequence(dir), 16, 16);
    EXPECT_EQ(src.frame_count(), 6);
    EXPECT_EQ(src.input_height(), 16);

    SequenceItem item;
    int idx = 0;
    while (src.next(item)) {
        EXPECT_EQ(item.index, idx);
        EXPECT_EQ(item.frame.height, 16);
        EXPECT_EQ(item.frame.width, 16);
        // solid frames survive the bilinear resize untouched
        EXPECT_EQ(item.frame.pixel(0, 0)[0], (idx + 1) * 10);
        EXPECT_EQ(item.frame.pixel(15, 15)[2], (idx + 1) * 10 + 2);

        if (idx < 2) {
            EXPECT_FALSE(item.has_ground_truth);
            EXPECT_TRUE(item.boxes.empty());
        } else {
            EXPECT_TRUE(item.has_ground_truth);
            // boxes normalized at native 64x64 mask resolution; the
            // unknown-label rectangle contributes nothing
            ASSERT_EQ(item.boxes.size(), 1u);
            EXPECT_DOUBLE_EQ(item.boxes[0].box.left, 0.125);
            EXPECT_DOUBLE_EQ(item.boxes[0].box.top, 0.125);
            EXPECT_DOUBLE_EQ(item.boxes[0].box.right, 0.375);
            EXPECT_DOUBLE_EQ(item.boxes[0].box.bottom, 0.375);
            EXPECT_EQ(item.boxes[0].frame_index, idx);
        }
        ++idx;
    }
    EXPECT_EQ(idx, 6);

    src.reset();
    ASSERT_TRUE(src.next(item));
    EXPECT_EQ(item.index, 0);
}

TEST(JsonManifest, FramesListWithBoxFile) {
    const fs::path dir = fs::path(testing::TempDir()) / "json_boxes";
    fs::create_directories(dir);
    for (int i = 0; i < 4; ++i) {
        cv::Mat img(16, 16, CV_8UC3, cv::Scalar(i, i, i));
        cv::imwrite((dir / ("f" + std::to_string(i) + ".png")).string(), img);
    }
    std::ofstream(dir / "boxes.json") << R"({
      "frames": {
        "2": [{"left": 0.1, "top": 0.2, "right": 0.5, "bottom": 0.6}],
        "3": [{"left": 0.0, "top": 0.0, "right": 0.25, "bottom": 0.25, "class_id": 2},
              {"left": 0.5, "top": 0.5, "right": 1.0, "bottom": 1.0}]
      }
    })";
    std::ofstream(dir / "manifest.json") << R"({
      "name": "jsonseq",
      "frames": ["f0.png", "f1.png", "f2.png", "f3.png"],
      "ground_truth": {"boxes": "boxes.json"},
      "roi": {"first": 1, "last": 3}
    })";

    auto m = load_manifest((dir / "manifest.json").string());
    EXPECT_EQ(m.name, "jsonseq");
    EXPECT_EQ(m.gt_kind, GroundTruthKind::BoxFile);

    FileSequenceSource src(m, 16, 16);
    SequenceItem item;
    ASSERT_TRUE(src.next(item));
    EXPECT_FALSE(item.has_ground_truth);  // frame 0 before the ROI
    ASSERT_TRUE(src.next(item));
    EXPECT_TRUE(item.has_ground_truth);  // in the ROI, no boxes listed
    EXPECT_TRUE(item.boxes.empty());
    ASSERT_TRUE(src.next(item));
    ASSERT_EQ(item.boxes.size(), 1u);
    EXPECT_DOUBLE_EQ(item.boxes[0].box.left, 0.1);
    ASSERT_TRUE(src.next(item));
    ASSERT_EQ(item.boxes.size(), 2u);
    EXPECT_EQ(item.boxes[0].class_id, 2);
    EXPECT_EQ(item.boxes[1].class_id, 1);
}

TEST(JsonManifest, MaskDirWithMinAreaOverride) {
    const fs::path dir = fs::path(testing::TempDir()) / "json_masks";
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "gt");
    for (int i = 0; i < 2; ++i) {
        cv::Mat img(20, 20, CV_8UC3, cv::Scalar(0, 0, 0));
        cv::imwrite((dir / "frames" / ("f" + std::to_string(i) + ".png")).string(), img);
        cv::Mat mask(20, 20, CV_8UC1, cv::Scalar(0));
        mask.at<std::uint8_t>(5, 5) = 255;  // single-pixel speckle
        cv::imwrite((dir / "gt" / ("g" + std::to_string(i) + ".png")).string(), mask);
    }
    std::ofstream(dir / "manifest.json") << R"({
      "frames_dir": "frames",
      "ground_truth": {"masks": "gt", "min_area": 1}
    })";

    auto m = load_manifest_json((dir / "manifest.json").string());
    EXPECT_EQ(m.min_component_area, 1);
    FileSequenceSource src(m, 20, 20);
    SequenceItem item;
    ASSERT_TRUE(src.next(item));
    ASSERT_EQ(item.boxes.size(), 1u);  // speckle kept under the lowered floor
    EXPECT_DOUBLE_EQ(item.boxes[0].box.left, 0.25);
}

TEST(Manifest, ValidationErrors) {
    const fs::path dir = fs::path(testing::TempDir()) / "manifest_errors";
    fs::create_directories(dir);

    std::ofstream(dir / "missing_frame.json") << R"({
      "frames": ["does_not_exist.png"]
    })";
    EXPECT_THROW(load_manifest_json((dir / "missing_frame.json").string()), ConfigError);

    std::ofstream(dir / "broken.json") << "{ nope";
    EXPECT_THROW(load_manifest_json((dir / "broken.json").string()), ConfigError);

    std::ofstream(dir / "no_frames.json") << R"({"name": "x"})";
    EXPECT_THROW(load_manifest_json((dir / "no_frames.json").string()), ConfigError);

    EXPECT_THROW(load_manifest_json("/nonexistent/manifest.json"), ConfigError);

    // frame/mask count mismatch
    fs::create_directories(dir / "fr");
    fs::create_directories(dir / "ms");
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(0, 0, 0));
    cv::imwrite((dir / "fr" / "a.png").string(), img);
    cv::imwrite((dir / "fr" / "b.png").string(), img);
    cv::Mat mask(8, 8, CV_8UC1, cv::Scalar(0));
    cv::imwrite((dir / "ms" / "a.png").string(), mask);
    std::ofstream(dir / "mismatch.json") << R"({
      "frames_dir": "fr",
      "ground_truth": {"masks": "ms"}
    })";
    try {
        load_manifest_json((dir / "mismatch.json").string());
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("mismatch"), std::string::npos);
    }
}

TEST(BoxFile, RejectsInvalidBoxes) {
    const fs::path dir = fs::path(testing::TempDir()) / "bad_boxes";
    fs::create_directories(dir);
    std::ofstream(dir / "boxes.json") << R"({
      "frames": {"0": [{"left": 0.6, "top": 0.2, "right": 0.5, "bottom": 0.6}]}
    })";
    EXPECT_THROW(load_box_file((dir / "boxes.json").string()), ConfigError);
    EXPECT_THROW(load_box_file("/nonexistent/boxes.json"), ConfigError);
}

TEST(Interop, FrameRoundtripIsLossless) {
    const std::string path = testing::TempDir() + "/roundtrip.png";
    Frame f = Frame::solid(24, 32, 0, 0, 0);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        f.data[i] = static_cast<std::uint8_t>((i * 7 + 13) % 256);
    imwrite_frame(path, f);
    Frame back = imread_frame(path);
    EXPECT_EQ(back.height, 24);
    EXPECT_EQ(back.width, 32);
    EXPECT_EQ(back.data, f.data);  // PNG is lossless

    Frame resized = imread_frame(path, 12, 16);
    EXPECT_EQ(resized.height, 12);
    EXPECT_EQ(resized.width, 16);
}

TEST(Interop, MaskRead) {
    const std::string path = testing::TempDir() + "/mask.png";
    cv::Mat mask(10, 12, CV_8UC1, cv::Scalar(0));
    mask.at<std::uint8_t>(3, 4) = 255;
    cv::imwrite(path, mask);
    int h = 0, w = 0;
    auto data = imread_mask(path, h, w);
    EXPECT_EQ(h, 10);
    EXPECT_EQ(w, 12);
    EXPECT_EQ(data[3 * 12 + 4], 255);
    EXPECT_EQ(data[0], 0);
}

TEST(Interop, PatchWithAlphaChannel) {
    const std::string path = testing::TempDir() + "/patch.png";
    cv::Mat bgra(2, 2, CV_8UC4, cv::Scalar(10, 20, 30, 0));
    bgra.at<cv::Vec4b>(0, 0) = cv::Vec4b(1, 2, 3, 200);
    cv::imwrite(path, bgra);

    std::vector<std::uint8_t> alpha;
    Frame patch = imread_patch(path, alpha);
    EXPECT_EQ(patch.height, 2);
    EXPECT_EQ(patch.width, 2);
    ASSERT_EQ(alpha.size(), 4u);
    EXPECT_EQ(alpha[0], 200);
    EXPECT_EQ(alpha[1], 0);
    EXPECT_EQ(patch.pixel(0, 0)[0], 1);
    EXPECT_EQ(patch.pixel(0, 0)[2], 3);

    // opaque 3-channel image: no alpha comes back
    const std::string rgb_path = testing::TempDir() + "/patch_rgb.png";
    cv::imwrite(rgb_path, cv::Mat(2, 2, CV_8UC3, cv::Scalar(5, 6, 7)));
    patch = imread_patch(rgb_path, alpha);
    EXPECT_TRUE(alpha.empty());
    EXPECT_EQ(patch.pixel(1, 1)[0], 5);
}

TEST(Interop, MissingFilesThrow) {
    EXPECT_THROW(imread_frame("/nonexistent/image.png"), std::runtime_error);
    int h, w;
    EXPECT_THROW(imread_mask("/nonexistent/mask.png", h, w), std::runtime_error);
}
