#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgate/core/errors.hpp"

namespace mgate {

enum class GroundTruthKind { None, MaskDir, BoxFile };

struct SequenceManifest {
    std::string name;
    std::vector<std::string> frame_paths;  // temporal order
    GroundTruthKind gt_kind = GroundTruthKind::None;
    std::vector<std::string> mask_paths;  // parallel to frame_paths when MaskDir
    std::string box_file;
    int roi_first = 0;   // inclusive frame indices carrying ground truth
    int roi_last = -1;   // -1 = last frame
    int min_component_area = 50;

    void validate() const {
        if (frame_paths.empty())
            throw ConfigError("manifest '" + name + "': no frames");
        for (const auto& p : frame_paths)
            if (!std::filesystem::exists(p))
                throw ConfigError("manifest '" + name + "': missing frame " + p);
        if (gt_kind == GroundTruthKind::MaskDir) {
            if (mask_paths.size() != frame_paths.size())
                throw ConfigError("manifest '" + name + "': frame/mask count mismatch (" +
                                  std::to_string(frame_paths.size()) + " vs " +
                                  std::to_string(mask_paths.size()) + ")");
            for (const auto& p : mask_paths)
                if (!std::filesystem::exists(p))
                    throw ConfigError("manifest '" + name + "': missing mask " + p);
        }
        if (gt_kind == GroundTruthKind::BoxFile && !std::filesystem::exists(box_file))
            throw ConfigError("manifest '" + name + "': missing box file " + box_file);
        if (roi_first < 0 || roi_first >= static_cast<int>(frame_paths.size()))
            throw ConfigError("manifest '" + name + "': roi_first out of range");
    }

    int resolved_roi_last() const {
        return roi_last < 0 ? static_cast<int>(frame_paths.size()) - 1 : roi_last;
    }
};

namespace detail {

inline std::vector<std::string> sorted_files(const std::filesystem::path& dir) {
    std::vector<std::string> out;
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("not a directory: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file())
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// CDNet2014 sequence layout: <dir>/input/*, <dir>/groundtruth/*, and a
/// temporalROI.txt holding two 1-based frame numbers.
inline SequenceManifest scan_cdnet_sequence(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    SequenceManifest m;
    m.name = root.filename().string();
    if (m.name.empty())
        m.name = root.parent_path().filename().string();
    m.frame_paths = detail::sorted_files(root / "input");
    if (fs::is_directory(root / "groundtruth")) {
        m.gt_kind = GroundTruthKind::MaskDir;
        m.mask_paths = detail::sorted_files(root / "groundtruth");
    }
    const fs::path roi = root / "temporalROI.txt";
    if (fs::exists(roi)) {
        std::ifstream in(roi);
        int first = 0, last = 0;
        if (!(in >> first >> last))
            throw ConfigError("unreadable temporalROI.txt in " + dir);
        m.roi_first = first - 1;  // CDNet counts frames from 1
        m.roi_last = last - 1;
    }
    m.validate();
    return m;
}

/// JSON manifest; relative paths resolve against the manifest's directory.
///
///   {
///     "name": "seq", "frames_dir": "input",        // or "frames": [...]
///     "ground_truth": {"masks": "groundtruth", "min_area": 50},
///                                                  // or {"boxes": "boxes.json"}
///     "roi": {"first": 0, "last": 99}
///   }
inline SequenceManifest load_manifest_json(const std::string& path) {
    namespace fs = std::filesystem;
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    const fs::path base = fs::path(path).parent_path();
    const auto resolve = [&](const std::string& p) {
        return (fs::path(p).is_absolute() ? fs::path(p) : base / p).string();
    };

    SequenceManifest m;
    m.name = j.value("name", fs::path(path).stem().string());
    if (j.contains("frames")) {
        for (const auto& f : j.at("frames"))
            m.frame_paths.push_back(resolve(f.get<std::string>()));
    } else if (j.contains("frames_dir")) {
        m.frame_paths = detail::sorted_files(resolve(j.at("frames_dir").get<std::string>()));
    } else {
        throw ConfigError("manifest needs 'frames' or 'frames_dir'");
    }
    if (j.contains("ground_truth")) {
        const auto& gt = j.at("ground_truth");
        if (gt.contains("masks")) {
            m.gt_kind = GroundTruthKind::MaskDir;
            m.mask_paths = detail::sorted_files(resolve(gt.at("masks").get<std::string>()));
        } else if (gt.contains("boxes")) {
            m.gt_kind = GroundTruthKind::BoxFile;
            m.box_file = resolve(gt.at("boxes").get<std::string>());
        } else {
            throw ConfigError("ground_truth needs 'masks' or 'boxes'");
        }
        m.min_component_area = gt.value("min_area", 50);
    }
    if (j.contains("roi")) {
        m.roi_first = j.at("roi").value("first", 0);
        m.roi_last = j.at("roi").value("last", -1);
    }
    m.validate();
    return m;
}

/// Dispatches on path kind: JSON file or CDNet-style sequence directory.
inline SequenceManifest load_manifest(const std::string& path) {
    if (std::filesystem::is_directory(path))
        return scan_cdnet_sequence(path);
    return load_manifest_json(path);
}

}  // namespace mgate
