#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgate/backend/cv_backend.hpp"
#include "mgate/backend/mock_backend.hpp"
#include "mgate/baseline/pixel_gate.hpp"
#include "mgate/core/pipeline.hpp"
#include "mgate/dataset/file_source.hpp"
#include "mgate/dataset/source.hpp"
#include "mgate/eval/measure.hpp"

namespace mgate {

enum class BackendKind { Mock, External };
enum class RunMode { Gated, Baseline, Raw };

inline const char* to_string(BackendKind k) {
    return k == BackendKind::Mock ? "mock" : "external";
}
inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Gated: return "gated";
        case RunMode::Baseline: return "baseline";
        default: return "raw";
    }
}

/// Distractor patch: either an image file or a generated solid rectangle.
struct DistractorSpec {
    std::string patch_path;  // empty when solid
    int solid_height = 0, solid_width = 0;
    std::uint8_t solid_b = 0, solid_g = 0, solid_r = 0;
    NormalizedBox placement;
    int start_frame = 0;
};

struct RunConfig {
    BackendKind backend = BackendKind::Mock;
    RunMode mode = RunMode::Gated;
    std::string node_map;  // external backend descriptor
    int mock_input_height = 0;  // 0 = take the dataset's dims
    int mock_input_width = 0;
    MockConfig mock;

    GateConfig gate;
    BaselineConfig baseline;

    std::vector<std::string> manifests;
    std::optional<SyntheticConfig> synthetic;
    std::optional<NoiseConfig> noise;
    std::optional<DistractorSpec> distractor;

    MeasureConfig measure;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
};

namespace detail {

template <typename F>
auto config_section(const char* section, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field '") + section + "': " + e.what());
    }
}

inline NormalizedBox parse_box(const nlohmann::json& j) {
    NormalizedBox b;
    b.left = j.at("left").get<double>();
    b.top = j.at("top").get<double>();
    b.right = j.at("right").get<double>();
    b.bottom = j.at("bottom").get<double>();
    if (!b.valid())
        throw ConfigError("invalid normalized box");
    return b;
}

inline SyntheticConfig parse_synthetic(const nlohmann::json& j) {
    SyntheticConfig s;
    s.name = j.value("name", std::string("synthetic"));
    s.height = j.value("height", 64);
    s.width = j.value("width", 64);
    s.frame_count = j.value("frames", 10);
    if (j.contains("background")) {
        const auto& c = j.at("background");
        s.bg_b = c.at(0).get<int>();
        s.bg_g = c.at(1).get<int>();
        s.bg_r = c.at(2).get<int>();
    }
    s.roi_first = j.value("roi_first", 0);
    s.roi_last = j.value("roi_last", -1);
    if (j.contains("blobs")) {
        for (const auto& bj : j.at("blobs")) {
            BlobSpec b;
            b.start_frame = bj.value("start", 0);
            b.end_frame = bj.value("end", s.frame_count - 1);
            b.x = bj.at("x").get<int>();
            b.y = bj.at("y").get<int>();
            b.width = bj.at("width").get<int>();
            b.height = bj.at("height").get<int>();
            b.dx = bj.value("dx", 0);
            b.dy = bj.value("dy", 0);
            if (bj.contains("color")) {
                const auto& c = bj.at("color");
                b.b = c.at(0).get<int>();
                b.g = c.at(1).get<int>();
                b.r = c.at(2).get<int>();
            }
            b.class_id = bj.value("class_id", 1);
            s.blobs.push_back(b);
        }
    }
    return s;
}

}  // namespace detail

/// Single JSON document describing a run; CLI flags override fields after
/// parsing. Relative paths resolve against the config file's directory.
inline RunConfig parse_run_config(const nlohmann::json& j, const std::string& base_dir = ".") {
    namespace fs = std::filesystem;
    const auto resolve = [&](const std::string& p) {
        return (fs::path(p).is_absolute() ? fs::path(p) : fs::path(base_dir) / p).string();
    };
    RunConfig c;

    detail::config_section("backend", [&] {
        if (j.contains("backend")) {
            const auto& b = j.at("backend");
            const std::string kind = b.value("kind", "mock");
            if (kind == "mock")
                c.backend = BackendKind::Mock;
            else if (kind == "external")
                c.backend = BackendKind::External;
            else
                throw ConfigError("backend.kind must be 'mock' or 'external'");
            if (b.contains("node_map"))
                c.node_map = resolve(b.at("node_map").get<std::string>());
            if (b.contains("input")) {
                c.mock_input_height = b.at("input").value("height", 0);
                c.mock_input_width = b.at("input").value("width", 0);
            }
            if (b.contains("mock")) {
                const auto& m = b.at("mock");
                c.mock.block = m.value("block", c.mock.block);
                c.mock.proj_channels = m.value("proj_channels", 0);
                c.mock.proj_seed = m.value("proj_seed", 0);
                c.mock.blob_threshold = m.value("blob_threshold", c.mock.blob_threshold);
                c.mock.min_blob_cells = m.value("min_blob_cells", 1);
                c.mock.extract_delay = std::chrono::microseconds(m.value("extract_delay_us", 0));
                c.mock.head_delay = std::chrono::microseconds(m.value("head_delay_us", 0));
                if (m.contains("canned")) {
                    for (const auto& cj : m.at("canned")) {
                        Detection d;
                        d.box = detail::parse_box(cj);
                        d.class_id = cj.value("class_id", 1);
                        d.score = cj.value("score", 0.9);
                        c.mock.canned.push_back(d);
                    }
                }
            }
        }
        return 0;
    });

    detail::config_section("mode", [&] {
        const std::string mode = j.value("mode", "gated");
        if (mode == "gated")
            c.mode = RunMode::Gated;
        else if (mode == "baseline")
            c.mode = RunMode::Baseline;
        else if (mode == "raw")
            c.mode = RunMode::Raw;
        else
            throw ConfigError("mode must be 'gated', 'baseline' or 'raw'");
        return 0;
    });

    detail::config_section("gate", [&] {
        if (j.contains("gate")) {
            const auto& g = j.at("gate");
            c.gate.layer_index = g.value("m", c.gate.layer_index);
            c.gate.lambda_gate = g.value("lambda", c.gate.lambda_gate);
            c.gate.lambda_gate = g.value("lambda_gate", c.gate.lambda_gate);
            c.gate.lambda_filter = g.value("lambda_filter", c.gate.lambda_gate);
            c.gate.alpha = g.value("alpha", c.gate.alpha);
        } else {
            c.gate.lambda_filter = c.gate.lambda_gate;
        }
        return 0;
    });

    detail::config_section("baseline", [&] {
        if (j.contains("baseline")) {
            const auto& b = j.at("baseline");
            c.baseline.threshold = b.value("threshold", c.baseline.threshold);
            c.baseline.alpha = b.value("alpha", c.baseline.alpha);
            c.baseline.grid_height = b.value("grid_height", 0);
            c.baseline.grid_width = b.value("grid_width", 0);
        }
        return 0;
    });

    detail::config_section("dataset", [&] {
        if (!j.contains("dataset"))
            throw ConfigError("missing 'dataset' section");
        const auto& d = j.at("dataset");
        if (d.contains("manifest"))
            c.manifests.push_back(resolve(d.at("manifest").get<std::string>()));
        if (d.contains("manifests"))
            for (const auto& m : d.at("manifests"))
                c.manifests.push_back(resolve(m.get<std::string>()));
        if (d.contains("synthetic"))
            c.synthetic = detail::parse_synthetic(d.at("synthetic"));
        if (c.manifests.empty() && !c.synthetic)
            throw ConfigError("dataset needs 'manifest', 'manifests' or 'synthetic'");
        if (!c.manifests.empty() && c.synthetic)
            throw ConfigError("dataset cannot mix manifests and synthetic");
        return 0;
    });

    detail::config_section("augment", [&] {
        if (!j.contains("augment"))
            return 0;
        const auto& a = j.at("augment");
        if (a.contains("noise")) {
            NoiseConfig n;
            n.mu = a.at("noise").value("mu", 0.8);
            n.sigma = a.at("noise").value("sigma", 0.2);
            n.seed = a.at("noise").value("seed", 0);
            n.validate();
            c.noise = n;
        }
        if (a.contains("distractor")) {
            const auto& dj = a.at("distractor");
            DistractorSpec d;
            if (dj.contains("patch")) {
                d.patch_path = resolve(dj.at("patch").get<std::string>());
            } else if (dj.contains("solid")) {
                const auto& s = dj.at("solid");
                d.solid_height = s.value("height", 8);
                d.solid_width = s.value("width", 8);
                const auto& col = s.at("color");
                d.solid_b = col.at(0).get<int>();
                d.solid_g = col.at(1).get<int>();
                d.solid_r = col.at(2).get<int>();
            } else {
                throw ConfigError("distractor needs 'patch' or 'solid'");
            }
            d.placement = detail::parse_box(dj.at("placement"));
            d.start_frame = dj.value("start_frame", 0);
            c.distractor = d;
        }
        return 0;
    });

    detail::config_section("eval", [&] {
        if (j.contains("eval")) {
            const auto& e = j.at("eval");
            c.measure.iou_threshold = e.value("iou_threshold", 0.5);
            const std::string interp = e.value("interpolation", "all-point");
            if (interp == "all-point")
                c.measure.interp = ApInterpolation::AllPoint;
            else if (interp == "11-point")
                c.measure.interp = ApInterpolation::ElevenPoint;
            else
                throw ConfigError("interpolation must be 'all-point' or '11-point'");
            c.measure.warmup_frames = e.value("warmup_frames", 10);
            c.measure.eval_class = e.value("eval_class", -1);
            c.measure.reference_frame = e.value("reference_frame", -1);
        }
        return 0;
    });

    c.seed = j.value("seed", 0);
    if (j.contains("out"))
        c.out_dir = resolve(j.at("out").get<std::string>());
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_run_config(j, std::filesystem::path(path).parent_path().string());
}

/// Builds the configured backend. Mock input dims fall back to the dataset's.
inline std::unique_ptr<SplitDetector> make_backend(const RunConfig& c) {
    if (c.backend == BackendKind::External) {
        if (c.node_map.empty())
            throw ConfigError("external backend needs a node map (--node-map or backend.node_map)");
        return std::make_unique<CvSplitDetector>(c.node_map, c.gate.layer_index);
    }
    int h = c.mock_input_height, w = c.mock_input_width;
    if ((h == 0 || w == 0) && c.synthetic) {
        h = c.synthetic->height;
        w = c.synthetic->width;
    }
    if (h < 1 || w < 1)
        throw ConfigError("mock backend needs input dims (backend.input or a synthetic dataset)");
    MockConfig mc = c.mock;
    if (mc.proj_channels > 0 && mc.proj_seed == 0)
        mc.proj_seed = c.seed;
    return std::make_unique<MockDetector>(h, w, mc);
}

inline DistractorOverlay make_distractor(const DistractorSpec& spec) {
    if (!spec.patch_path.empty()) {
        std::vector<std::uint8_t> alpha;
        Frame patch = imread_patch(spec.patch_path, alpha);
        return DistractorOverlay(patch, std::move(alpha), spec.placement, spec.start_frame);
    }
    Frame patch = Frame::solid(spec.solid_height, spec.solid_width, spec.solid_b, spec.solid_g,
                               spec.solid_r);
    return DistractorOverlay(patch, {}, spec.placement, spec.start_frame);
}

/// One source per sequence, augmentation wrappers applied. The effective
/// noise seed mixes the run seed so --seed changes augmentation streams.
inline std::vector<std::unique_ptr<SequenceSource>> make_sources(const RunConfig& c,
                                                                 int input_height,
                                                                 int input_width) {
    std::vector<std::unique_ptr<SequenceSource>> sources;
    if (c.synthetic) {
        sources.push_back(std::make_unique<SyntheticSource>(*c.synthetic));
    } else {
        for (const auto& path : c.manifests)
            sources.push_back(std::make_unique<FileSequenceSource>(load_manifest(path),
                                                                   input_height, input_width));
    }
    if (!c.noise && !c.distractor)
        return sources;

    std::optional<NoiseConfig> noise = c.noise;
    if (noise)
        noise->seed = mix_seed(c.seed, noise->seed);
    for (auto& s : sources) {
        std::optional<DistractorOverlay> overlay;
        if (c.distractor)
            overlay = make_distractor(*c.distractor);
        s = std::make_unique<AugmentingSource>(std::move(s), std::move(overlay), noise);
    }
    return sources;
}

}  // namespace mgate
