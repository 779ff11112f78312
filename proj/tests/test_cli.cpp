#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = MGATE_CLI_PATH;
const std::string kModelDir = std::string(MGATE_FIXTURE_DIR) + "/model";

int run_cli(const std::string& args, const std::string& capture_path = "") {
    std::string cmd = kCli + " " + args;
    if (capture_path.empty())
        cmd += " >/dev/null 2>&1";
    else
        cmd += " >" + capture_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1)
        return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

std::string out_dir(const std::string& name) {
    const fs::path p = fs::path(testing::TempDir()) / name;
    fs::create_directories(p);
    return p.string();
}

// the built-in demo scene, reproduced as a config document so tests can
// flip fields the flags do not cover (mode, dataset, augmentation)
nlohmann::json demo_config_json() {
    return nlohmann::json{
        {"backend", {{"kind", "mock"}, {"mock", {{"block", 8}}}}},
        {"gate", {{"m", 1}, {"lambda", 0.4}}},
        {"dataset",
         {{"synthetic",
           {{"name", "demo"},
            {"height", 64},
            {"width", 64},
            {"frames", 120},
            {"background", {64, 8, 8}},
            {"blobs",
             {{{"start", 20},
               {"end", 26},
               {"x", 0},
               {"y", 24},
               {"width", 16},
               {"height", 16},
               {"dx", 8},
               {"color", {64, 255, 255}}}}}}}}},
    };
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
    const std::string path = (fs::path(testing::TempDir()) / name).string();
    std::ofstream(path) << j.dump(2);
    return path;
}

}  // namespace

TEST(Cli, RequiresSubcommand) {
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("bogus-subcommand"), 1);
    EXPECT_EQ(run_cli("run --no-such-flag"), 1);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("run --help"), 0);
}

TEST(Cli, DefaultDemoRunWritesReports) {
    const std::string dir = out_dir("demo_run");
    const std::string log = dir + "/stdout.txt";
    ASSERT_EQ(run_cli("run --out " + dir, log), 0);

    ASSERT_TRUE(fs::exists(dir + "/report.json"));
    ASSERT_TRUE(fs::exists(dir + "/summary.csv"));
    ASSERT_TRUE(fs::exists(dir + "/trace_demo.csv"));

    const auto j = load_json(dir + "/report.json");
    EXPECT_EQ(j["mode"], "gated");
    EXPECT_EQ(j["backend"], "mock");
    EXPECT_EQ(j["frames"], 120);
    EXPECT_EQ(j["moving_frames"], 7);  // the blob crosses for 7 frames
    EXPECT_EQ(j["head_invocations"], 7);
    EXPECT_DOUBLE_EQ(j["map"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["config"]["lambda_gate"].get<double>(), 0.4);
    EXPECT_NE(j["config_hash"].get<std::uint64_t>(), 0u);

    const std::string summary = slurp(dir + "/summary.csv");
    EXPECT_NE(summary.find("label,backend,mode"), std::string::npos);
    EXPECT_NE(summary.find("demo,mock,gated"), std::string::npos);

    const std::string trace = slurp(dir + "/trace_demo.csv");
    EXPECT_NE(trace.find("frame,decision"), std::string::npos);
    EXPECT_NE(trace.find("moving"), std::string::npos);
}

TEST(Cli, RawModeRunsHeadEveryFrame) {
    auto cfg = demo_config_json();
    cfg["mode"] = "raw";
    const std::string path = write_config("raw_cfg.json", cfg);
    const std::string dir = out_dir("raw_run");
    ASSERT_EQ(run_cli("run --config " + path + " --out " + dir), 0);
    const auto j = load_json(dir + "/report.json");
    EXPECT_EQ(j["mode"], "raw");
    EXPECT_EQ(j["head_invocations"], 120);
    EXPECT_DOUBLE_EQ(j["map"].get<double>(), 1.0);
}

TEST(Cli, LambdaZeroMatchesRawScore) {
    const std::string gated_dir = out_dir("lz_gated");
    ASSERT_EQ(run_cli("run --lambda-gate 0 --out " + gated_dir), 0);
    const auto gated = load_json(gated_dir + "/report.json");
    EXPECT_EQ(gated["head_invocations"], 120);  // gate disabled

    auto cfg = demo_config_json();
    cfg["mode"] = "raw";
    const std::string path = write_config("lz_raw_cfg.json", cfg);
    const std::string raw_dir = out_dir("lz_raw");
    ASSERT_EQ(run_cli("run --config " + path + " --out " + raw_dir), 0);
    const auto raw = load_json(raw_dir + "/report.json");
    EXPECT_EQ(gated["map"].get<double>(), raw["map"].get<double>());
}

TEST(Cli, BaselineModeViaConfig) {
    auto cfg = demo_config_json();
    cfg["mode"] = "baseline";
    cfg["baseline"] = {{"threshold", 500.0}};
    const std::string path = write_config("baseline_cfg.json", cfg);
    const std::string dir = out_dir("baseline_run");
    ASSERT_EQ(run_cli("run --config " + path + " --out " + dir), 0);
    const auto j = load_json(dir + "/report.json");
    EXPECT_EQ(j["mode"], "baseline");
    EXPECT_DOUBLE_EQ(j["config"]["baseline_threshold"].get<double>(), 500.0);
    EXPECT_DOUBLE_EQ(j["map"].get<double>(), 1.0);
    EXPECT_EQ(j["head_invocations"], 7);
}

TEST(Cli, ConfigErrorsExitOne) {
    EXPECT_EQ(run_cli("run --config /nonexistent/config.json"), 1);

    const std::string bad = write_config("bad_cfg.json", nlohmann::json());
    std::ofstream(bad) << "{ not json";
    EXPECT_EQ(run_cli("run --config " + bad), 1);

    // external backend without any node map
    EXPECT_EQ(run_cli("run --backend external"), 1);

    const std::string log = out_dir("cfg_errs") + "/missing_model.txt";
    EXPECT_EQ(run_cli("run --backend external --model /nonexistent/model.json", log), 1);
    const std::string text = slurp(log);
    EXPECT_NE(text.find("config error"), std::string::npos) << text;
    EXPECT_NE(text.find("/nonexistent/model.json"), std::string::npos) << text;
}

TEST(Cli, CorruptModelExitsTwo) {
    const fs::path dir = fs::path(testing::TempDir()) / "corrupt_model";
    fs::create_directories(dir);
    std::ofstream(dir / "broken.pb") << "this is not a frozen graph";
    std::ofstream(dir / "node_map.json") << R"({
      "layer_count": 4,
      "input": {"height": 32, "width": 48},
      "splits": {"1": {"prefix": "broken.pb", "head": "broken.pb"}}
    })";
    EXPECT_EQ(run_cli("run --backend external --node-map " + (dir / "node_map.json").string()), 2);
}

TEST(Cli, GridSearchWritesMatricesAndHeatmap) {
    const std::string dir = out_dir("grid");
    ASSERT_EQ(run_cli("grid-search --lambda-values 0,0.4 --serial-timing --out " + dir), 0);
    EXPECT_TRUE(fs::exists(dir + "/grid_map.csv"));
    EXPECT_TRUE(fs::exists(dir + "/grid_time.csv"));
    EXPECT_TRUE(fs::exists(dir + "/grid_map.svg"));
    EXPECT_TRUE(fs::exists(dir + "/runs.csv"));
    ASSERT_TRUE(fs::exists(dir + "/best_cells.json"));

    const auto best = load_json(dir + "/best_cells.json");
    EXPECT_EQ(best["failed_cells"], 0);
    EXPECT_EQ(best["cells"], 4);  // m in {1,2} x lambda in {0, 0.4}
    EXPECT_DOUBLE_EQ(best["best_map"]["map"].get<double>(), 1.0);

    const std::string matrix = slurp(dir + "/grid_map.csv");
    EXPECT_NE(matrix.find("m\\lambda,0,0.4"), std::string::npos);
    // one runs.csv row per cell plus the header
    const std::string runs = slurp(dir + "/runs.csv");
    EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 5);
}

TEST(Cli, GridSearchValidatesLists) {
    EXPECT_EQ(run_cli("grid-search --lambda-values 0,1.5"), 1);
    EXPECT_EQ(run_cli("grid-search --lambda-values abc"), 1);
    EXPECT_EQ(run_cli("grid-search --m-values 1.5"), 1);
}

TEST(Cli, GridSearchPartialFailureExitsThree) {
    // synthetic scene matched to the external model input, m=3 not in the
    // node map: that cell fails, the m=1 cell succeeds
    auto cfg = demo_config_json();
    cfg["backend"] = {{"kind", "external"}, {"node_map", kModelDir + "/node_map.json"}};
    cfg["dataset"]["synthetic"]["height"] = 32;
    cfg["dataset"]["synthetic"]["width"] = 48;
    const std::string path = write_config("grid_ext_cfg.json", cfg);
    const std::string dir = out_dir("grid_partial");
    const std::string log = dir + "/stderr.txt";
    EXPECT_EQ(run_cli("grid-search --config " + path + " --m-values 1,3 --lambda-values 0.4" +
                          " --serial-timing --out " + dir,
                      log),
              3);
    EXPECT_NE(slurp(log).find("m=3"), std::string::npos);
    const auto best = load_json(dir + "/best_cells.json");
    EXPECT_EQ(best["failed_cells"], 1);
}

TEST(Cli, CompareBaselineEmitsSweep) {
    const std::string dir = out_dir("compare");
    ASSERT_EQ(run_cli("compare-baseline --lambda-values 0.4 --thresholds 500 --serial-timing"
                      " --out " +
                      dir),
              0);
    ASSERT_TRUE(fs::exists(dir + "/compare.csv"));
    ASSERT_TRUE(fs::exists(dir + "/compare_summary.json"));

    const std::string csv = slurp(dir + "/compare.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);  // header + raw + gated + baseline
    EXPECT_NE(csv.find(",raw,"), std::string::npos);
    EXPECT_NE(csv.find(",gated,"), std::string::npos);
    EXPECT_NE(csv.find(",baseline,"), std::string::npos);

    const auto summary = load_json(dir + "/compare_summary.json");
    EXPECT_DOUBLE_EQ(summary["raw"]["map"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(summary["best_gated"]["map"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(summary["best_baseline"]["map"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(summary["best_gated"]["lambda"].get<double>(), 0.4);
}

TEST(Cli, AugmentRoundtrip) {
    const std::string dir = out_dir("augmented");
    ASSERT_EQ(run_cli("augment --out " + dir), 0);
    ASSERT_TRUE(fs::exists(dir + "/demo/frames/000000.png"));
    ASSERT_TRUE(fs::exists(dir + "/demo/frames/000119.png"));
    ASSERT_TRUE(fs::exists(dir + "/demo/boxes.json"));
    ASSERT_TRUE(fs::exists(dir + "/demo/manifest.json"));

    const auto boxes = load_json(dir + "/demo/boxes.json");
    EXPECT_EQ(boxes["frames"]["20"].size(), 1u);  // the blob's annotated frames
    EXPECT_TRUE(boxes["frames"]["0"].empty());

    // feed the materialized sequence back through a run
    nlohmann::json cfg = {
        {"backend",
         {{"kind", "mock"}, {"input", {{"height", 64}, {"width", 64}}}, {"mock", {{"block", 8}}}}},
        {"gate", {{"m", 1}, {"lambda", 0.4}}},
        {"dataset", {{"manifest", dir + "/demo/manifest.json"}}},
    };
    const std::string path = write_config("roundtrip_cfg.json", cfg);
    const std::string rerun = out_dir("augment_rerun");
    ASSERT_EQ(run_cli("run --config " + path + " --out " + rerun), 0);
    const auto j = load_json(rerun + "/report.json");
    EXPECT_EQ(j["frames"], 120);
    EXPECT_DOUBLE_EQ(j["map"].get<double>(), 1.0);  // lossless frames, same boxes
    EXPECT_EQ(j["moving_frames"], 7);
}

TEST(Cli, SeedChangesNoiseButNotCleanRuns) {
    auto cfg = demo_config_json();
    cfg["augment"] = {{"noise", {{"mu", 0.8}, {"sigma", 0.2}}}};
    const std::string path = write_config("seeded_cfg.json", cfg);

    const std::string a = out_dir("seed_a");
    const std::string b = out_dir("seed_b");
    const std::string c = out_dir("seed_c");
    ASSERT_EQ(run_cli("run --config " + path + " --seed 1 --out " + a), 0);
    ASSERT_EQ(run_cli("run --config " + path + " --seed 1 --out " + b), 0);
    ASSERT_EQ(run_cli("run --config " + path + " --seed 2 --out " + c), 0);

    const auto ja = load_json(a + "/report.json");
    const auto jb = load_json(b + "/report.json");
    const auto jc = load_json(c + "/report.json");
    // identical seeds reproduce the exact run; different seeds change the
    // noise stream and the hash echo
    EXPECT_EQ(ja["map"].get<double>(), jb["map"].get<double>());
    EXPECT_EQ(ja["moving_frames"], jb["moving_frames"]);
    EXPECT_EQ(ja["config_hash"], jb["config_hash"]);
    EXPECT_NE(ja["config_hash"], jc["config_hash"]);
}
