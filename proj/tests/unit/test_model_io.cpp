#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "kitbench/data_io.hpp"
#include "kitbench/errors.hpp"
#include "kitbench/model_io.hpp"
#include "support.hpp"

namespace kitbench::kitnet {
namespace {

class ModelIo : public ::testing::Test {
 protected:
  void SetUp() override {
    trained_ = testing::small_model();
    calib_ = calibrate_threshold(trained_.phi, 1.25);
    dir_ = std::filesystem::temp_directory_path() /
           ("kitbench_model_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  TrainingResult trained_;
  ThresholdCalibration calib_;
  std::filesystem::path dir_;
};

TEST_F(ModelIo, RoundTripIsBitIdentical) {
  const auto path = dir_ / "m.kbm";
  save_model(trained_.model, calib_, path);
  const StoredModel loaded = load_model(path);
  EXPECT_EQ(loaded.model, trained_.model);
  EXPECT_EQ(loaded.calibration, calib_);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto x = testing::random_vector(rng, 12, -3, 3);
    EXPECT_EQ(score(loaded.model, x), score(trained_.model, x));
  }
}

TEST_F(ModelIo, SerializationIsStable) {
  EXPECT_EQ(serialize_model(trained_.model, calib_), serialize_model(trained_.model, calib_));
  const std::string text = serialize_model(trained_.model, calib_);
  EXPECT_EQ(serialize_model(parse_model(text).model, parse_model(text).calibration), text);
  EXPECT_EQ(text.rfind("kitbench-model v1\n", 0), 0u);
}

TEST_F(ModelIo, TruncatedFileIsMalformed) {
  const std::string text = serialize_model(trained_.model, calib_);
  for (std::size_t cut : {text.size() / 4, text.size() / 2, text.size() - 5}) {
    EXPECT_THROW(parse_model(text.substr(0, cut)), MalformedModelError) << cut;
  }
}

TEST_F(ModelIo, UnknownVersionIsVersionError) {
  std::string text = serialize_model(trained_.model, calib_);
  text.replace(0, text.find('\n'), "kitbench-model v7");
  EXPECT_THROW(parse_model(text), ModelVersionError);
}

TEST_F(ModelIo, GarbageIsMalformed) {
  EXPECT_THROW(parse_model(""), MalformedModelError);
  EXPECT_THROW(parse_model("not a model\n"), ModelFileError);
  std::string text = serialize_model(trained_.model, calib_);
  const auto pos = text.find("score_normalizer");
  text.insert(text.find('\n', pos) + 1, "x,y\n");
  EXPECT_THROW(parse_model(text), MalformedModelError);
}

TEST_F(ModelIo, MissingFileIsIoError) {
  EXPECT_THROW(load_model(dir_ / "absent.kbm"), ModelIoError);
  EXPECT_THROW(save_model(trained_.model, calib_, dir_ / "no" / "such" / "dir.kbm"), ModelIoError);
}

}  // namespace
}  // namespace kitbench::kitnet
