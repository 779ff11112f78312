#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mgate/config/run_config.hpp"
#include "mgate/report/serialize.hpp"

namespace fs = std::filesystem;
using namespace mgate;

namespace {

// ---------------------------------------------------------------- CLI plumbing

struct Common {
    std::string config;
    std::string backend;
    std::string model;
    std::string node_map;
    std::string out;
    int m = 0;
    double lambda_gate = 0.0;
    double lambda_filter = 0.0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool serial_timing = false;

    CLI::Option* o_backend = nullptr;
    CLI::Option* o_model = nullptr;
    CLI::Option* o_node_map = nullptr;
    CLI::Option* o_m = nullptr;
    CLI::Option* o_lambda_gate = nullptr;
    CLI::Option* o_lambda_filter = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "run config JSON (omit for a built-in synthetic demo)");
    c.o_backend = cmd->add_option("--backend", c.backend, "mock | external")
                      ->check(CLI::IsMember({"mock", "external"}));
    c.o_model = cmd->add_option("--model", c.model,
                                "model directory (containing node_map.json) or node-map file");
    c.o_node_map = cmd->add_option("--node-map", c.node_map, "split descriptor JSON");
    c.o_m = cmd->add_option("--m", c.m, "split layer index");
    c.o_lambda_gate = cmd->add_option("--lambda-gate", c.lambda_gate, "frame gate threshold");
    c.o_lambda_filter = cmd->add_option("--lambda-filter", c.lambda_filter, "box filter threshold");
    c.o_alpha = cmd->add_option("--alpha", c.alpha, "background EMA retention");
    c.o_seed = cmd->add_option("--seed", c.seed, "run seed (augmentation streams)");
    c.o_out = cmd->add_option("--out", c.out, "output directory");
    cmd->add_flag("--serial-timing", c.serial_timing, "single worker, uncontended timings");
}

RunConfig default_demo_config() {
    // The gate compares cell colors by angle, so the demo scene needs
    // chromatic contrast: a bright yellow blob crossing a dark blue field.
    // Cell-aligned geometry keeps the mock detections identical to ground
    // truth, so the demo lands at MAP 1.0 when gating behaves.
    RunConfig cfg;
    SyntheticConfig s;
    s.name = "demo";
    s.height = 64;
    s.width = 64;
    s.frame_count = 120;
    s.bg_b = 64;
    s.bg_g = 8;
    s.bg_r = 8;
    BlobSpec blob;
    blob.start_frame = 20;
    blob.end_frame = 26;
    blob.x = 0;
    blob.y = 24;
    blob.width = 16;
    blob.height = 16;
    blob.dx = 8;
    blob.b = 64;
    blob.g = 255;
    blob.r = 255;
    s.blobs.push_back(blob);
    cfg.synthetic = s;
    cfg.mock.block = 8;
    cfg.gate.layer_index = 1;
    return cfg;
}

RunConfig build_config(const Common& c) {
    RunConfig cfg = c.config.empty() ? default_demo_config() : load_run_config(c.config);
    if (c.o_backend->count())
        cfg.backend = c.backend == "external" ? BackendKind::External : BackendKind::Mock;
    if (c.o_node_map->count()) {
        cfg.node_map = c.node_map;
    } else if (c.o_model->count()) {
        cfg.node_map = fs::is_directory(c.model) ? (fs::path(c.model) / "node_map.json").string()
                                                 : c.model;
    }
    if (c.o_m->count())
        cfg.gate.layer_index = c.m;
    if (c.o_lambda_gate->count()) {
        cfg.gate.lambda_gate = c.lambda_gate;
        if (!c.o_lambda_filter->count())
            cfg.gate.lambda_filter = c.lambda_gate;
    }
    if (c.o_lambda_filter->count())
        cfg.gate.lambda_filter = c.lambda_filter;
    if (c.o_alpha->count()) {
        cfg.gate.alpha = c.alpha;
        cfg.baseline.alpha = c.alpha;
    }
    if (c.o_seed->count())
        cfg.seed = c.seed;
    if (c.o_out->count())
        cfg.out_dir = c.out;
    return cfg;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": cannot parse '" + tok + "'");
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_double_list(text, what)) {
        if (v != std::floor(v))
            throw ConfigError(std::string(what) + ": expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// ------------------------------------------------------------------ execution

using NamedTrace = std::pair<std::string, std::vector<FrameTrace>>;

EvalReport execute_run(const RunConfig& cfg, bool parallel_load,
                       std::vector<NamedTrace>* traces = nullptr) {
    auto backend = make_backend(cfg);
    const SplitDetectorSpec& spec = backend->spec();
    auto sources = make_sources(cfg, spec.input_height, spec.input_width);

    std::vector<SequenceMeasurement> runs;
    for (auto& src : sources) {
        SequenceMeasurement m;
        switch (cfg.mode) {
            case RunMode::Gated: {
                Pipeline p(*backend, cfg.gate);
                m = measure_pipeline(p, *src, cfg.measure);
                break;
            }
            case RunMode::Baseline: {
                BaselinePipeline p(*backend, cfg.baseline);
                m = measure_pipeline(p, *src, cfg.measure);
                break;
            }
            case RunMode::Raw: {
                RawPipeline p(*backend);
                m = measure_pipeline(p, *src, cfg.measure);
                break;
            }
        }
        if (traces)
            traces->emplace_back(m.sequence, m.trace);
        runs.push_back(std::move(m));
    }

    EvalReport r = aggregate_measurements(runs, cfg.measure);
    r.backend = to_string(cfg.backend);
    r.mode = to_string(cfg.mode);
    r.layer_index = cfg.gate.layer_index;
    r.lambda_gate = cfg.gate.lambda_gate;
    r.lambda_filter = cfg.gate.lambda_filter;
    r.alpha = cfg.mode == RunMode::Baseline ? cfg.baseline.alpha : cfg.gate.alpha;
    if (cfg.mode == RunMode::Baseline)
        r.baseline_threshold = cfg.baseline.threshold;
    r.seed = cfg.seed;
    r.parallel_load = parallel_load;
    r.config_hash = compute_config_hash(r);
    return r;
}

void print_report_line(const EvalReport& r) {
    std::printf("%-10s %-8s m=%-2d", r.mode.c_str(), r.backend.c_str(), r.layer_index);
    if (r.mode == "baseline")
        std::printf(" t=%-7.4g", r.baseline_threshold);
    else
        std::printf(" lg=%.2f lf=%.2f", r.lambda_gate, r.lambda_filter);
    std::printf("  map=");
    if (std::isnan(r.map))
        std::printf("   n/a");
    else
        std::printf("%6.4f", r.map);
    std::printf("  head=%5.1f%%  mean=%.1fus  frames=%ld\n", 100.0 * r.head_fraction,
                r.mean_frame_us, r.frames);
}

/// Runs jobs over a fixed-size worker pool; slot i of the result vector is
/// owned exclusively by the worker that drew index i.
template <typename Job>
void run_pool(int workers, int job_count, Job&& job) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min(workers, job_count));
    pool.reserve(n);
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < job_count; i = next.fetch_add(1))
                job(i);
        });
    for (auto& t : pool)
        t.join();
}

int pick_workers(bool serial, int jobs) {
    if (serial)
        return 1;
    const unsigned hw = std::thread::hardware_concurrency();
    return std::max(1, std::min<int>(hw ? static_cast<int>(hw) : 2, jobs));
}

// ---------------------------------------------------------------- subcommands

int cmd_run(const Common& c) {
    RunConfig cfg = build_config(c);
    fs::create_directories(cfg.out_dir);
    std::vector<NamedTrace> traces;
    EvalReport r = execute_run(cfg, false, &traces);

    write_report_json((fs::path(cfg.out_dir) / "report.json").string(), r);
    {
        std::ofstream csv(fs::path(cfg.out_dir) / "summary.csv");
        csv << csv_header() << "\n" << csv_row(r) << "\n";
    }
    for (const auto& [name, trace] : traces)
        write_trace_csv((fs::path(cfg.out_dir) / ("trace_" + name + ".csv")).string(), trace);

    print_report_line(r);
    std::printf("report: %s\n", (fs::path(cfg.out_dir) / "report.json").c_str());
    return 0;
}

int cmd_grid_search(const Common& c, const std::string& m_list, const std::string& lambda_list) {
    RunConfig base = build_config(c);
    base.measure.keep_trace = false;

    std::vector<int> ms;
    if (!m_list.empty()) {
        ms = parse_int_list(m_list, "--m-values");
    } else if (c.o_m->count()) {
        ms = {c.m};
    } else {
        // default: every split the backend can provide
        auto probe = make_backend(base);
        for (int m = 1; m <= probe->spec().layer_count; ++m) {
            if (base.backend == BackendKind::External) {
                RunConfig cell = base;
                cell.gate.layer_index = m;
                try {
                    make_backend(cell);
                } catch (const std::exception&) {
                    continue;  // node map does not expose this split
                }
            }
            ms.push_back(m);
        }
    }
    std::vector<double> lambdas = lambda_list.empty()
                                      ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                                            0.6, 0.7, 0.8, 0.9, 1.0}
                                      : parse_double_list(lambda_list, "--lambda-values");
    if (ms.empty())
        throw ConfigError("grid search: empty m list");
    if (lambdas.empty())
        throw ConfigError("grid search: empty lambda list");
    for (double l : lambdas)
        if (l < 0.0 || l > 1.0)
            throw ConfigError("grid search: lambda values must lie in [0, 1]");

    const int rows = static_cast<int>(ms.size());
    const int cols = static_cast<int>(lambdas.size());
    const int cells = rows * cols;
    const int workers = pick_workers(c.serial_timing, cells);
    const bool parallel = workers > 1;

    std::vector<std::optional<EvalReport>> results(cells);
    std::vector<std::string> errors(cells);
    run_pool(workers, cells, [&](int i) {
        RunConfig cell = base;
        cell.gate.layer_index = ms[i / cols];
        cell.gate.lambda_gate = lambdas[i % cols];
        cell.gate.lambda_filter = lambdas[i % cols];
        try {
            results[i] = execute_run(cell, parallel);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    fs::create_directories(base.out_dir);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> map_grid(rows, std::vector<double>(cols, nan));
    std::vector<std::vector<double>> time_grid(rows, std::vector<double>(cols, nan));
    std::ofstream runs_csv(fs::path(base.out_dir) / "runs.csv");
    runs_csv << csv_header() << "\n";
    int failed = 0;
    int best_map_cell = -1, best_ratio_cell = -1;
    double best_map = -1.0, best_ratio = -1.0;
    for (int i = 0; i < cells; ++i) {
        if (!results[i]) {
            ++failed;
            std::fprintf(stderr, "cell m=%d lambda=%g failed: %s\n", ms[i / cols],
                         lambdas[i % cols], errors[i].c_str());
            continue;
        }
        const EvalReport& r = *results[i];
        map_grid[i / cols][i % cols] = r.map;
        time_grid[i / cols][i % cols] = r.mean_frame_us;
        runs_csv << csv_row(r) << "\n";
        if (!std::isnan(r.map)) {
            if (r.map > best_map) {
                best_map = r.map;
                best_map_cell = i;
            }
            if (r.mean_frame_us > 0.0 && r.map / r.mean_frame_us > best_ratio) {
                best_ratio = r.map / r.mean_frame_us;
                best_ratio_cell = i;
            }
        }
    }

    std::vector<double> m_labels(ms.begin(), ms.end());
    write_matrix_csv((fs::path(base.out_dir) / "grid_map.csv").string(), "m\\lambda", m_labels,
                     lambdas, map_grid);
    write_matrix_csv((fs::path(base.out_dir) / "grid_time.csv").string(), "m\\lambda", m_labels,
                     lambdas, time_grid);
    write_heatmap_svg((fs::path(base.out_dir) / "grid_map.svg").string(), "MAP over (m, lambda)",
                      "m", "lambda", m_labels, lambdas, map_grid, 0.0, 1.0);

    nlohmann::json best;
    const auto cell_json = [&](int i) {
        nlohmann::json j;
        j["m"] = ms[i / cols];
        j["lambda"] = lambdas[i % cols];
        j["map"] = results[i]->map;
        j["mean_frame_us"] = results[i]->mean_frame_us;
        j["config_hash"] = results[i]->config_hash;
        return j;
    };
    if (best_map_cell >= 0)
        best["best_map"] = cell_json(best_map_cell);
    if (best_ratio_cell >= 0)
        best["best_map_per_time"] = cell_json(best_ratio_cell);
    best["failed_cells"] = failed;
    best["cells"] = cells;
    {
        std::ofstream out(fs::path(base.out_dir) / "best_cells.json");
        out << best.dump(2) << "\n";
    }

    std::printf("grid %dx%d done, %d failed\n", rows, cols, failed);
    if (best_map_cell >= 0)
        std::printf("best MAP %.4f at m=%d lambda=%g\n", best_map, ms[best_map_cell / cols],
                    lambdas[best_map_cell % cols]);
    if (best_ratio_cell >= 0)
        std::printf("best MAP/time at m=%d lambda=%g (%.4f / %.1fus)\n",
                    ms[best_ratio_cell / cols], lambdas[best_ratio_cell % cols],
                    results[best_ratio_cell]->map, results[best_ratio_cell]->mean_frame_us);
    return failed > 0 ? 3 : 0;
}

int cmd_compare_baseline(const Common& c, const std::string& lambda_list,
                         const std::string& threshold_list) {
    RunConfig base = build_config(c);
    base.measure.keep_trace = false;

    const std::vector<double> lambdas =
        lambda_list.empty()
            ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}
            : parse_double_list(lambda_list, "--lambda-values");
    const std::vector<double> thresholds =
        threshold_list.empty()
            ? std::vector<double>{0, 100, 250, 500, 750, 1000, 1500, 2000, 2500}
            : parse_double_list(threshold_list, "--thresholds");
    if (lambdas.empty())
        throw ConfigError("compare-baseline: empty lambda list");
    if (thresholds.empty())
        throw ConfigError("compare-baseline: empty threshold list");
    for (double t : thresholds)
        if (t < 0.0)
            throw ConfigError("compare-baseline: thresholds must be >= 0");

    // job 0 = raw reference, then the gated sweep, then the baseline sweep
    const int jobs = 1 + static_cast<int>(lambdas.size()) + static_cast<int>(thresholds.size());
    const int workers = pick_workers(c.serial_timing, jobs);
    const bool parallel = workers > 1;
    std::vector<std::optional<EvalReport>> results(jobs);
    std::vector<std::string> errors(jobs);
    run_pool(workers, jobs, [&](int i) {
        RunConfig cfg = base;
        if (i == 0) {
            cfg.mode = RunMode::Raw;
        } else if (i <= static_cast<int>(lambdas.size())) {
            cfg.mode = RunMode::Gated;
            cfg.gate.lambda_gate = lambdas[i - 1];
            cfg.gate.lambda_filter = lambdas[i - 1];
        } else {
            cfg.mode = RunMode::Baseline;
            cfg.baseline.threshold = thresholds[i - 1 - lambdas.size()];
        }
        try {
            results[i] = execute_run(cfg, parallel);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for (int i = 0; i < jobs; ++i)
        if (!results[i])
            throw std::runtime_error("comparison job " + std::to_string(i) +
                                     " failed: " + errors[i]);

    fs::create_directories(base.out_dir);
    std::ofstream csv(fs::path(base.out_dir) / "compare.csv");
    csv << csv_header() << "\n";
    for (const auto& r : results)
        csv << csv_row(*r) << "\n";

    const EvalReport& raw = *results[0];
    int best_gated = 1, best_base = 1 + static_cast<int>(lambdas.size());
    for (int i = 1; i <= static_cast<int>(lambdas.size()); ++i)
        if (!std::isnan(results[i]->map) &&
            (std::isnan(results[best_gated]->map) || results[i]->map > results[best_gated]->map))
            best_gated = i;
    for (int i = 1 + static_cast<int>(lambdas.size()); i < jobs; ++i)
        if (!std::isnan(results[i]->map) &&
            (std::isnan(results[best_base]->map) || results[i]->map > results[best_base]->map))
            best_base = i;

    nlohmann::json summary;
    summary["raw"] = {{"map", raw.map}, {"mean_frame_us", raw.mean_frame_us}};
    summary["best_gated"] = {{"lambda", results[best_gated]->lambda_gate},
                             {"map", results[best_gated]->map},
                             {"mean_frame_us", results[best_gated]->mean_frame_us}};
    summary["best_baseline"] = {{"threshold", results[best_base]->baseline_threshold},
                                {"map", results[best_base]->map},
                                {"mean_frame_us", results[best_base]->mean_frame_us}};
    {
        std::ofstream out(fs::path(base.out_dir) / "compare_summary.json");
        out << summary.dump(2) << "\n";
    }

    print_report_line(raw);
    print_report_line(*results[best_gated]);
    print_report_line(*results[best_base]);
    std::printf("comparison: %s\n", (fs::path(base.out_dir) / "compare.csv").c_str());
    return 0;
}

int cmd_augment(const Common& c) {
    RunConfig cfg = build_config(c);
    int h = 0, w = 0;
    if (cfg.synthetic) {
        h = cfg.synthetic->height;
        w = cfg.synthetic->width;
    } else {
        auto backend = make_backend(cfg);
        h = backend->spec().input_height;
        w = backend->spec().input_width;
    }
    auto sources = make_sources(cfg, h, w);

    for (auto& src : sources) {
        const fs::path seq_dir = fs::path(cfg.out_dir) / src->name();
        fs::create_directories(seq_dir / "frames");
        nlohmann::json frames_json = nlohmann::json::object();
        int written = 0, roi_first = -1, roi_last = -1;
        SequenceItem item;
        while (src->next(item)) {
            char name[32];
            std::snprintf(name, sizeof(name), "%06d.png", item.index);
            imwrite_frame((seq_dir / "frames" / name).string(), item.frame);
            ++written;
            if (item.has_ground_truth) {
                if (roi_first < 0)
                    roi_first = item.index;
                roi_last = item.index;
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& g : item.boxes)
                    arr.push_back({{"left", g.box.left},
                                   {"top", g.box.top},
                                   {"right", g.box.right},
                                   {"bottom", g.box.bottom},
                                   {"class_id", g.class_id}});
                frames_json[std::to_string(item.index)] = arr;
            }
        }
        {
            std::ofstream out(seq_dir / "boxes.json");
            out << nlohmann::json{{"frames", frames_json}}.dump(2) << "\n";
        }
        nlohmann::json manifest;
        manifest["name"] = src->name();
        manifest["frames_dir"] = "frames";
        manifest["ground_truth"] = {{"boxes", "boxes.json"}};
        if (roi_first >= 0)
            manifest["roi"] = {{"first", roi_first}, {"last", roi_last}};
        {
            std::ofstream out(seq_dir / "manifest.json");
            out << manifest.dump(2) << "\n";
        }
        std::printf("%s: %d frames -> %s\n", src->name().c_str(), written, seq_dir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion-gated object detection: runs, sweeps, comparisons"};
    app.require_subcommand(1);

    Common run_c, grid_c, cmp_c, aug_c;
    std::string grid_m_list, grid_lambda_list;
    std::string cmp_lambda_list, cmp_threshold_list;

    CLI::App* run = app.add_subcommand("run", "single measured run, full reports");
    add_common_options(run, run_c);

    CLI::App* grid = app.add_subcommand("grid-search", "sweep (m, lambda), emit heatmap data");
    add_common_options(grid, grid_c);
    grid->add_option("--m-values", grid_m_list, "comma list of split indices");
    grid->add_option("--lambda-values", grid_lambda_list, "comma list of thresholds in [0,1]");

    CLI::App* cmp = app.add_subcommand("compare-baseline",
                                       "gated sweep vs pixel-baseline sweep vs raw detector");
    add_common_options(cmp, cmp_c);
    cmp->add_option("--lambda-values", cmp_lambda_list, "gated sweep thresholds");
    cmp->add_option("--thresholds", cmp_threshold_list, "baseline sweep thresholds");

    CLI::App* aug = app.add_subcommand("augment", "materialize the augmented sequences to disk");
    add_common_options(aug, aug_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run))
            return cmd_run(run_c);
        if (app.got_subcommand(grid))
            return cmd_grid_search(grid_c, grid_m_list, grid_lambda_list);
        if (app.got_subcommand(cmp))
            return cmd_compare_baseline(cmp_c, cmp_lambda_list, cmp_threshold_list);
        if (app.got_subcommand(aug))
            return cmd_augment(aug_c);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
