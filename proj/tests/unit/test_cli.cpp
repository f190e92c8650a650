#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "../../tools/cli.hpp"
#include "kitbench/data_io.hpp"
#include "kitbench/errors.hpp"
#include "kitbench/model_io.hpp"
#include "kitbench/report_io.hpp"

namespace kitbench::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "kitbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(ParseGrid, RangesAndLists) {
  EXPECT_EQ(parse_grid("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_grid("2:9:1"), std::vector<double>{2.0});
  EXPECT_EQ(parse_grid("1e-5, 0.1,100"), (std::vector<double>{1e-5, 0.1, 100.0}));
  const auto g = parse_grid("0.1:0.7:7");
  EXPECT_EQ(g.size(), 7u);
  EXPECT_EQ(g.back(), 0.7);
  for (const char* bad : {"", "  ", ",", "1:2", "1:2:0", "1:2:2.5", "a,b", "1:x:3", "nan"}) {
    EXPECT_THROW(parse_grid(bad), ConfigError) << bad;
  }
}

class CliFlow : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("kitbench_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    const Outcome s = invoke({"synth", "--out", path("data.csv"), "--n-features", "8", "--n-benign",
                              "600", "--n-malicious", "60", "--shift-values", "6,3", "--seed", "2"});
    ASSERT_EQ(s.code, kExitOk) << s.err;
    const Outcome t = invoke({"train", "--data", path("data.csv"), "--label-column", "label",
                              "--model", path("m.kbm"), "--fm-window", "200", "--train-window",
                              "400", "--seed", "1"});
    ASSERT_EQ(t.code, kExitOk) << t.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string path(const std::string& name) { return (dir_ / name).string(); }
  static fs::path dir_;
};

fs::path CliFlow::dir_;

TEST_F(CliFlow, SynthIsByteIdenticalForASeed) {
  ASSERT_EQ(invoke({"synth", "--out", path("a.csv"), "--n-benign", "20", "--seed", "9"}).code, kExitOk);
  ASSERT_EQ(invoke({"synth", "--out", path("b.csv"), "--n-benign", "20", "--seed", "9"}).code, kExitOk);
  EXPECT_EQ(io::read_file(path("a.csv")), io::read_file(path("b.csv")));
  ASSERT_EQ(invoke({"synth", "--out", path("c.csv"), "--n-benign", "20", "--seed", "10"}).code, kExitOk);
  EXPECT_NE(io::read_file(path("a.csv")), io::read_file(path("c.csv")));
}

TEST_F(CliFlow, TrainSkipsMaliciousRowsAndReportsThreshold) {
  const Outcome t = invoke({"train", "--data", path("data.csv"), "--label-column", "label", "--model",
                            path("m2.kbm"), "--fm-window", "200", "--train-window", "400", "--seed",
                            "1"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_NE(t.out.find("skipped 60 malicious"), std::string::npos);
  EXPECT_NE(t.out.find("threshold: "), std::string::npos);
  EXPECT_NE(t.out.find("# resolved train configuration"), std::string::npos);
  // Same inputs and seed give the same model bytes.
  EXPECT_EQ(io::read_file(path("m.kbm")), io::read_file(path("m2.kbm")));
}

TEST_F(CliFlow, CalibrateRewritesThreshold) {
  const Outcome c = invoke({"calibrate", "--model", path("m.kbm"), "--out", path("m3.kbm"), "--beta",
                            "2", "--phi", "0.25"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  const auto stored = kitnet::load_model(path("m3.kbm"));
  EXPECT_EQ(stored.calibration.phi, 0.25);
  EXPECT_EQ(stored.calibration.threshold, 0.5);
  EXPECT_EQ(invoke({"calibrate", "--model", path("m.kbm"), "--out", path("m4.kbm"), "--beta", "0.5"}).code,
            kExitModel);
}

TEST_F(CliFlow, EvaluateWritesReports) {
  const Outcome e = invoke({"evaluate", "--model", path("m.kbm"), "--data", path("data.csv"), "--out",
                            path("ev"), "--t-min", "0", "--t-max", "5", "--steps", "11"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_NE(e.out.find("AUC: "), std::string::npos);
  const auto r = report::read_threshold_sweep(path("ev.json"));
  EXPECT_EQ(r.grid.size(), 11u);
  EXPECT_EQ(r.n_malicious, 60u);
  EXPECT_GT(r.auc, 0.9);
  EXPECT_EQ(r.config["resolved"]["steps"], "11");
  const std::string grid = io::read_file(path("ev_grid.csv"));
  EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 12);
  EXPECT_TRUE(fs::exists(path("ev_roc.csv")));
}

TEST_F(CliFlow, AttackRunsEachMethod) {
  for (const char* method : {"fgsm", "jsma", "cw", "enm"}) {
    const std::string prefix = path(std::string("atk_") + method);
    const Outcome a = invoke({"attack", "--model", path("m.kbm"), "--data", path("data.csv"), "--method",
                              method, "--n", "4", "--c", "10", "--max-steps", "100", "--enm-steps",
                              "100", "--out", prefix, "--workers", "1"});
    ASSERT_EQ(a.code, kExitOk) << method << ": " << a.err;
    EXPECT_NE(a.out.find("method\tviolation\tsuccess(%)"), std::string::npos);
    const auto r = report::read_campaign(prefix + ".json");
    EXPECT_EQ(r.n_samples, 4u);
    EXPECT_EQ(r.method, eval::method_name(eval::parse_method(method)));
    EXPECT_EQ(r.reverify_failures, 0u);
    const std::string csv = io::read_file(prefix + ".csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  }
}

TEST_F(CliFlow, EnmMarginFlags) {
  const auto margin = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"attack", "--model", path("m.kbm"), "--data", path("data.csv"),
                                  "--method", "enm", "--n", "1", "--enm-steps", "10", "--out",
                                  path("margin")};
    args.insert(args.end(), extra.begin(), extra.end());
    const Outcome o = invoke(args);
    EXPECT_EQ(o.code, kExitOk) << o.err;
    return report::read_campaign(path("margin.json")).config["attack"];
  };
  EXPECT_EQ(margin({"--enm-confidence", "0.25"})["confidence"], 0.25);
  EXPECT_EQ(margin({"--confidence", "0.5"})["confidence"], 0.5);
  EXPECT_EQ(margin({"--confidence", "0.5", "--enm-confidence", "0.25"})["confidence"], 0.25);
  EXPECT_EQ(margin({"--enm-binary-search", "2"})["binary_search_steps"], 2);
  EXPECT_EQ(margin({})["confidence"], 0.0);
}

TEST_F(CliFlow, SweepWritesOnePointPerValue) {
  const Outcome s = invoke({"sweep", "--model", path("m.kbm"), "--data", path("data.csv"),
                            "--parameter", "beta", "--values", "0.01,1", "--c", "10", "--n", "3",
                            "--enm-steps", "100", "--out", path("sw")});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const auto r = report::read_sweep(path("sw.json"));
  EXPECT_EQ(r.swept_parameter, "beta");
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].value, 0.01);
}

TEST_F(CliFlow, ConfigFileAndPrecedence) {
  io::write_file(path("run.toml"), "[synth]\nseed = 4\n[evaluate]\nsteps = 5\nt-max = 2.0\n"
                                   "model = \"" + path("m.kbm") + "\"\n");
  const Outcome e = invoke({"--config", path("run.toml"), "evaluate", "--data", path("data.csv"),
                            "--out", path("cfg"), "--steps", "7"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const auto r = report::read_threshold_sweep(path("cfg.json"));
  EXPECT_EQ(r.grid.size(), 7u);
  EXPECT_EQ(r.grid.back().threshold, 2.0);
  EXPECT_NE(e.out.find("#   steps=7"), std::string::npos);

  for (const char* bad : {"[evaluate]\nstepz = 5\n", "steps = 5\n", "[evaluat]\nsteps = 5\n"}) {
    io::write_file(path("bad.toml"), bad);
    EXPECT_EQ(invoke({"--config", path("bad.toml"), "evaluate", "--model", path("m.kbm"), "--data",
                      path("data.csv"), "--out", path("cfg")})
                  .code,
              kExitUsage)
        << bad;
  }
  EXPECT_EQ(invoke({"--config", path("absent.toml"), "synth", "--out", path("z.csv")}).code, kExitUsage);
}

TEST_F(CliFlow, ExitCodes) {
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"evaluate", "--data", path("data.csv")}).code, kExitUsage);
  EXPECT_EQ(invoke({"attack", "--model", path("m.kbm"), "--data", path("data.csv"), "--method",
                    "deepfool"})
                .code,
            kExitUsage);
  EXPECT_EQ(invoke({"sweep", "--model", path("m.kbm"), "--data", path("data.csv"), "--values", ""}).code,
            kExitUsage);
  EXPECT_EQ(invoke({"--isa", "sse9", "synth", "--out", path("x.csv")}).code, kExitUsage);
  EXPECT_EQ(invoke({"synth", "--out", path("missing/dir/x.csv")}).code, kExitData);
  EXPECT_EQ(invoke({"evaluate", "--model", path("m.kbm"), "--data", path("nope.csv")}).code, kExitData);
  EXPECT_EQ(invoke({"evaluate", "--model", path("data.csv"), "--data", path("data.csv")}).code,
            kExitModel);
  // Windows larger than the stream.
  EXPECT_EQ(invoke({"train", "--data", path("data.csv"), "--model", path("w.kbm"), "--fm-window",
                    "5000", "--train-window", "5000"})
                .code,
            kExitModel);
  // Width mismatch between model and data.
  ASSERT_EQ(invoke({"synth", "--out", path("wide.csv"), "--n-features", "9"}).code, kExitOk);
  EXPECT_EQ(invoke({"evaluate", "--model", path("m.kbm"), "--data", path("wide.csv")}).code, kExitData);
  // A single-class file cannot be evaluated.
  ASSERT_EQ(invoke({"synth", "--out", path("benign.csv"), "--n-features", "8", "--n-malicious", "0",
                    "--n-benign", "50"})
                .code,
            kExitOk);
  const Outcome one = invoke({"evaluate", "--model", path("m.kbm"), "--data", path("benign.csv"), "--out",
                              path("one")});
  EXPECT_EQ(one.code, kExitModel);
  EXPECT_NE(one.err.find("kitbench: "), std::string::npos);
}

}  // namespace
}  // namespace kitbench::cli
