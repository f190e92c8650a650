#include <gtest/gtest.h>

#include <filesystem>

#include "kitbench/data_io.hpp"
#include "kitbench/errors.hpp"
#include "kitbench/report_io.hpp"

namespace kitbench::report {
namespace {

std::size_t line_count(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

eval::ThresholdSweepReport sample_sweep() {
  const std::vector<double> scores{0.1, 0.7, 0.3, 0.9, 1.0 / 3.0};
  const std::vector<Label> labels{Label::benign, Label::malicious, Label::benign, Label::malicious,
                                  Label::benign};
  auto r = eval::sweep_threshold_scores(scores, labels, 0.0, 1.0, 3);
  r.config["note"] = "x";
  return r;
}

eval::AttackCampaignReport sample_campaign() {
  eval::AttackCampaignReport r;
  r.method = "enm";
  r.violation = eval::Violation::availability;
  r.n_samples = 2;
  r.successes = 1;
  r.success_rate = 50.0;
  r.sample_rows = {4, 9};
  attacks::AdversarialResult ok{{0.1, 0.2}, {0.1, 0.2 + 1.0 / 7.0}, true, 17, std::nullopt};
  ok.distances = attacks::lp_distances(ok.original, ok.adversarial);
  attacks::AdversarialResult failed{{0.5, 0.5}, {0.5, 0.5}, false, 1000, std::nullopt};
  r.per_sample = {ok, failed};
  r.mean_distances = eval::mean_distances(r.per_sample);
  r.seed = 18446744073709551615ull;
  r.threshold = 0.123456789012345678;
  r.config["attack"] = {{"c", 450.0}};
  return r;
}

eval::SweepReport sample_beta_sweep() {
  eval::SweepReport r;
  r.swept_parameter = "beta";
  r.points.push_back({1e-5, 100.0, 10, eval::MeanDistances{19.5, 1.1, 0.3, 0.2}});
  r.points.push_back({100.0, 0.0, 0, std::nullopt});
  return r;
}

class ReportIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("kitbench_report_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(ReportIo, ThresholdSweepRoundTrip) {
  const auto r = sample_sweep();
  const auto m = write_report(r, dir_ / "s.json", Format::structured);
  EXPECT_EQ(read_threshold_sweep(dir_ / "s.json"), r);
  EXPECT_EQ(m.checksum, io::sha256_hex(io::read_file(dir_ / "s.json")));
  EXPECT_EQ(m.bytes, std::filesystem::file_size(dir_ / "s.json"));
}

TEST_F(ReportIo, CampaignRoundTrip) {
  const auto r = sample_campaign();
  write_report(r, dir_ / "c.json", Format::structured);
  EXPECT_EQ(read_campaign(dir_ / "c.json"), r);
}

TEST_F(ReportIo, SweepRoundTrip) {
  const auto r = sample_beta_sweep();
  write_report(r, dir_ / "b.json", Format::structured);
  EXPECT_EQ(read_sweep(dir_ / "b.json"), r);
}

TEST_F(ReportIo, CsvShapes) {
  const auto s = sample_sweep();
  const std::string grid = grid_csv(s);
  EXPECT_EQ(line_count(grid), 4u);
  EXPECT_EQ(grid.substr(0, grid.find('\n')), "schema_version,threshold,fpr,fnr,accuracy");
  EXPECT_EQ(line_count(roc_csv(s)), 1 + s.roc.size());
  const std::string camp = campaign_csv(sample_campaign());
  EXPECT_EQ(line_count(camp), 3u);
  EXPECT_NE(camp.find("\n1,1,9,0,1000,,,,\n"), std::string::npos);
  const std::string sweep = sweep_csv(sample_beta_sweep());
  EXPECT_NE(sweep.find("1,beta,100,0,0,,,,\n"), std::string::npos);
  const auto m = write_report(s, dir_ / "g.csv", Format::csv);
  EXPECT_EQ(io::read_file(dir_ / "g.csv"), grid);
  EXPECT_EQ(m.format, Format::csv);
}

TEST_F(ReportIo, FormatNames) {
  EXPECT_EQ(parse_format("structured"), Format::structured);
  EXPECT_EQ(parse_format("json"), Format::structured);
  EXPECT_EQ(parse_format("csv"), Format::csv);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST_F(ReportIo, RejectsWrongKindAndVersion) {
  auto j = to_json(sample_beta_sweep());
  EXPECT_THROW(campaign_from_json(j), DataError);
  j["schema_version"] = 99;
  EXPECT_THROW(sweep_from_json(j), DataError);
  j = to_json(sample_beta_sweep());
  j.erase("points");
  EXPECT_THROW(sweep_from_json(j), DataError);
  io::write_file(dir_ / "bad.json", "{not json");
  EXPECT_THROW(read_sweep(dir_ / "bad.json"), DataError);
}

TEST_F(ReportIo, UnwritablePath) {
  EXPECT_THROW(write_report(sample_sweep(), dir_ / "no" / "x.json", Format::structured), IoError);
}

}  // namespace
}  // namespace kitbench::report
