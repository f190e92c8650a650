#pragma once

// KitNET: an ensemble of small autoencoders over clusters of correlated
// features, whose normalized RMSE scores feed an aggregate autoencoder.
// The aggregate autoencoder's RMSE is the anomaly score S; the alarm fires
// when S >= T with T = phi * beta_threshold.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kitbench/matrix.hpp"
#include "kitbench/nn.hpp"
#include "kitbench/score_model.hpp"

namespace kitbench::kitnet {

struct FeatureMap {
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t max_cluster_size = 0;

  std::size_t feature_count() const;
  /// Throws ShapeError unless clusters partition 0..n-1 with every size in [1, m].
  void validate(std::size_t n) const;

  bool operator==(const FeatureMap&) const = default;
};

/// Average-linkage agglomerative clustering on 1 - |pearson correlation|;
/// dendrogram nodes larger than `max_cluster_size` are split into their
/// children. Clusters are listed by smallest member, members ascending.
FeatureMap build_feature_map(const Matrix& rows, std::size_t max_cluster_size);

/// Per-feature min/max scaling onto [0, 1]. Inputs outside the fitted range
/// map outside [0, 1]; constant features map to 0.
class MinMaxNormalizer {
 public:
  MinMaxNormalizer() = default;
  explicit MinMaxNormalizer(std::size_t dim);
  MinMaxNormalizer(std::vector<double> mins, std::vector<double> maxs);

  std::size_t dim() const noexcept { return mins_.size(); }
  /// True once at least one vector has been observed.
  bool fitted() const noexcept;

  /// Widens the range to include x. Throws DataError on non-finite input.
  void update(std::span<const double> x);

  void normalize(std::span<const double> x, std::span<double> out) const;
  std::vector<double> normalize(std::span<const double> x) const;

  /// d norm(x)_i / d x_i; zero for constant features.
  double slope(std::size_t i) const;

  const std::vector<double>& mins() const noexcept { return mins_; }
  const std::vector<double>& maxs() const noexcept { return maxs_; }

  bool operator==(const MinMaxNormalizer&) const = default;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// max(1, ceil(ratio * d)), capped at d - 1 when d > 1 so the code layer is a bottleneck.
std::size_t hidden_size(std::size_t input_dim, double hidden_ratio);

struct KitNetModel {
  MinMaxNormalizer input_normalizer;
  FeatureMap feature_map;
  std::vector<nn::Autoencoder> ensemble;
  MinMaxNormalizer score_normalizer;
  nn::Autoencoder output_ae;
  double hidden_ratio = 0.75;

  std::size_t input_dim() const noexcept { return input_normalizer.dim(); }
  void validate() const;

  bool operator==(const KitNetModel&) const = default;
};

/// S(x) for a raw feature vector.
double score(const KitNetModel& model, std::span<const double> x);
/// S for a vector already mapped through the input normalizer.
double score_normalized(const KitNetModel& model, std::span<const double> u);

/// dS/dx by the chain rule through every pipeline stage; returns S.
double score_gradient(const KitNetModel& model, std::span<const double> x, std::span<double> grad);
double score_gradient_normalized(const KitNetModel& model, std::span<const double> u,
                                 std::span<double> grad);

/// Which vector space a scorer reads: raw features or the normalized feature space.
enum class InputSpace { raw, normalized };

class KitNetScorer final : public ScoreModel {
 public:
  KitNetScorer(const KitNetModel& model, InputSpace space);

  std::size_t input_dim() const override;
  double score(std::span<const double> x) const override;
  double score_gradient(std::span<const double> x, std::span<double> grad) const override;

  const KitNetModel& model() const noexcept { return *model_; }
  InputSpace space() const noexcept { return space_; }

 private:
  const KitNetModel* model_;
  InputSpace space_;
};

struct ThresholdCalibration {
  double phi = 0.0;
  double beta_threshold = 1.0;
  double threshold = 0.0;

  bool operator==(const ThresholdCalibration&) const = default;
};

/// T = phi * beta_threshold. Throws CalibrationError when beta_threshold < 1.
ThresholdCalibration calibrate_threshold(double phi, double beta_threshold);

Logits logits(const KitNetModel& model, std::span<const double> x,
              const ThresholdCalibration& calib);
Label classify(const KitNetModel& model, std::span<const double> x,
               const ThresholdCalibration& calib);

struct TrainingConfig {
  std::size_t fm_window = 5000;
  std::size_t train_window = 50000;
  double learning_rate = 0.1;
  std::size_t max_cluster_size = 10;
  double hidden_ratio = 0.75;
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Online trainer. Feed instances one at a time: the first fm_window only
/// update the input normalizer and are buffered for the feature map; the next
/// train_window each take one SGD step on every autoencoder. Instances beyond
/// the two windows are ignored.
class OnlineTrainer {
 public:
  explicit OnlineTrainer(TrainingConfig cfg);

  /// Returns the pre-update score for training-phase instances.
  std::optional<double> feed(std::span<const double> x);

  bool complete() const noexcept;
  std::size_t instances_seen() const noexcept { return seen_; }
  /// Highest score recorded during the training phase.
  double phi() const noexcept { return phi_; }
  const std::vector<double>& training_scores() const noexcept { return scores_; }
  const KitNetModel& model() const;

  /// Throws TrainingError unless both windows have been consumed.
  KitNetModel finish() &&;

 private:
  void build_ensemble();
  double train_step(std::span<const double> x);

  TrainingConfig cfg_;
  std::size_t seen_ = 0;
  std::size_t dim_ = 0;
  Matrix buffer_;
  KitNetModel model_;
  bool ensemble_ready_ = false;
  double phi_ = 0.0;
  std::vector<double> scores_;
};

struct TrainingResult {
  KitNetModel model;
  double phi = 0.0;
  std::vector<double> training_scores;
};

/// Trains on the first fm_window + train_window rows of `stream`.
/// Throws TrainingError if the stream is shorter than that.
TrainingResult train_online(const Matrix& stream, const TrainingConfig& cfg);

}  // namespace kitbench::kitnet
