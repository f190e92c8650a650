#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kitbench/matrix.hpp"
#include "kitbench/score_model.hpp"

namespace kitbench::io {

struct LabeledDataset {
  Matrix rows;
  std::vector<Label> labels;

  std::size_t count(Label label) const;
  /// Throws DataError when labels and rows disagree in length.
  void validate() const;

  bool operator==(const LabeledDataset&) const = default;
};

/// A parsed feature CSV. `labels` is present only when a label column was requested.
struct FeatureTable {
  std::vector<std::string> feature_names;
  Matrix rows;
  std::optional<std::vector<Label>> labels;

  /// Throws DataError when the table has no labels.
  LabeledDataset labeled() const;
};

/// Comma-separated, header row required. Label cells must be 0/1 or
/// benign/malicious. Errors name the offending 1-based line.
FeatureTable parse_feature_csv(std::string_view content,
                               const std::optional<std::string>& label_column);
FeatureTable load_feature_csv(const std::filesystem::path& path,
                              const std::optional<std::string>& label_column);

/// Benign rows follow a linear latent-factor model around `benign_center`:
///   x_j = center + spread * (sum_r L_jr z_r + noise * e_j),  z, e ~ N(0, 1),
/// with each loading row L_j scaled to unit norm (latent_dim 0 gives
/// independent features). Malicious rows are drawn the same way and then
/// offset by `malicious_shift` (one entry per feature; empty means no shift).
struct SyntheticConfig {
  std::size_t n_features = 20;
  std::size_t n_benign = 2000;
  std::size_t n_malicious = 500;
  double benign_center = 0.0;
  double benign_spread = 1.0;
  std::vector<double> malicious_shift;
  std::size_t latent_dim = 3;
  double noise = 0.2;
  std::uint64_t seed = 0;

  /// `shift` applied to the first `count` features (all when count is 0).
  static std::vector<double> leading_shift(std::size_t n_features, double shift, std::size_t count);
  void validate() const;
};

/// Benign rows first, then malicious rows. Pure function of the config.
LabeledDataset generate_synthetic(const SyntheticConfig& cfg);

/// Header f0..f{n-1},label; shortest round-trip numbers.
std::string dataset_to_csv(const LabeledDataset& data);
void write_dataset_csv(const LabeledDataset& data, const std::filesystem::path& path);

struct DatasetManifest {
  std::string path;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  bool has_labels = false;
  std::size_t n_benign = 0;
  std::size_t n_malicious = 0;
  std::string checksum;  // sha256 hex of the file bytes
};

DatasetManifest describe_dataset(const std::filesystem::path& path, const FeatureTable& table);

std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
/// Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kitbench::io
