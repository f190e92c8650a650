#pragma once

// Versioned UTF-8 text model format. Sections appear in this fixed order:
//
//   kitbench-model v1
//   header <n> <m> <hidden_ratio>
//   input_normalizer            then two lines: mins, maxs (comma-separated)
//   feature_map <k>             then k lines of space-separated feature indices
//   ensemble <k>                then k autoencoder blocks
//   score_normalizer            then two lines: mins, maxs
//   output_autoencoder          then one autoencoder block
//   calibration <phi> <beta_threshold>
//   end
//
// An autoencoder block is
//
//   autoencoder <input_dim> <hidden_dim>
//   encoder <activation>        then hidden_dim weight rows, then one bias row
//   decoder <activation>        then input_dim weight rows, then one bias row
//
// Every number is written in its shortest round-trip decimal form, so a
// loaded model reproduces scores bit for bit.

#include <filesystem>
#include <string>
#include <string_view>

#include "kitbench/kitnet.hpp"

namespace kitbench::kitnet {

inline constexpr int kModelFormatVersion = 1;

struct StoredModel {
  KitNetModel model;
  ThresholdCalibration calibration;
};

std::string serialize_model(const KitNetModel& model, const ThresholdCalibration& calib);
/// Throws ModelVersionError or MalformedModelError.
StoredModel parse_model(std::string_view text);

/// Throws ModelIoError when the file cannot be written.
void save_model(const KitNetModel& model, const ThresholdCalibration& calib,
                const std::filesystem::path& path);
/// Throws ModelIoError, ModelVersionError or MalformedModelError.
StoredModel load_model(const std::filesystem::path& path);

}  // namespace kitbench::kitnet
