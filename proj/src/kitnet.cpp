#include "kitbench/kitnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kitbench/errors.hpp"

namespace kitbench {

std::string_view label_name(Label label) {
  return label == Label::benign ? "benign" : "malicious";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "0" || text == "benign") return Label::benign;
  if (text == "1" || text == "malicious") return Label::malicious;
  return std::nullopt;
}

}  // namespace kitbench

namespace kitbench::kitnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

// Scores of every ensemble autoencoder for a normalized input.
std::vector<double> ensemble_scores(const KitNetModel& model, std::span<const double> u) {
  std::vector<double> e(model.ensemble.size());
  std::vector<double> slice;
  for (std::size_t k = 0; k < model.ensemble.size(); ++k) {
    const auto& cluster = model.feature_map.clusters[k];
    slice.resize(cluster.size());
    for (std::size_t j = 0; j < cluster.size(); ++j) slice[j] = u[cluster[j]];
    e[k] = nn::autoencoder_score(model.ensemble[k], slice);
  }
  return e;
}

}  // namespace

// --- MinMaxNormalizer -------------------------------------------------------

MinMaxNormalizer::MinMaxNormalizer(std::size_t dim) : mins_(dim, kInf), maxs_(dim, -kInf) {}

MinMaxNormalizer::MinMaxNormalizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  require_dim(maxs_.size(), mins_.size(), "normalizer bounds");
  for (std::size_t i = 0; i < mins_.size(); ++i) {
    if (!std::isfinite(mins_[i]) || !std::isfinite(maxs_[i]) || mins_[i] > maxs_[i]) {
      throw DomainError("normalizer bounds must be finite with min <= max (feature " +
                        std::to_string(i) + ")");
    }
  }
}

bool MinMaxNormalizer::fitted() const noexcept {
  return mins_.empty() || mins_.front() <= maxs_.front();
}

void MinMaxNormalizer::update(std::span<const double> x) {
  require_dim(x.size(), dim(), "normalizer update");
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("non-finite value fed to normalizer");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    mins_[i] = std::min(mins_[i], x[i]);
    maxs_[i] = std::max(maxs_[i], x[i]);
  }
}

void MinMaxNormalizer::normalize(std::span<const double> x, std::span<double> out) const {
  require_dim(x.size(), dim(), "normalize input");
  require_dim(out.size(), dim(), "normalize output");
  if (!fitted()) throw DomainError("normalizer has not observed any data");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = maxs_[i] - mins_[i];
    out[i] = range > 0.0 ? (x[i] - mins_[i]) / range : 0.0;
  }
}

std::vector<double> MinMaxNormalizer::normalize(std::span<const double> x) const {
  std::vector<double> out(x.size());
  normalize(x, out);
  return out;
}

double MinMaxNormalizer::slope(std::size_t i) const {
  const double range = maxs_.at(i) - mins_.at(i);
  return range > 0.0 ? 1.0 / range : 0.0;
}

// --- model -----------------------------------------------------------------

std::size_t hidden_size(std::size_t input_dim, double hidden_ratio) {
  const auto raw = static_cast<std::size_t>(std::ceil(hidden_ratio * static_cast<double>(input_dim)));
  std::size_t h = std::max<std::size_t>(1, raw);
  if (input_dim > 1) h = std::min(h, input_dim - 1);
  return h;
}

void KitNetModel::validate() const {
  const std::size_t n = input_dim();
  if (n == 0) throw ShapeError("model has no input features");
  feature_map.validate(n);
  const std::size_t k = feature_map.clusters.size();
  if (ensemble.size() != k) {
    throw ShapeError("ensemble has " + std::to_string(ensemble.size()) + " autoencoders for " +
                     std::to_string(k) + " clusters");
  }
  for (std::size_t i = 0; i < k; ++i) {
    ensemble[i].validate();
    const std::size_t d = feature_map.clusters[i].size();
    if (ensemble[i].input_dim() != d) throw ShapeError("ensemble autoencoder/cluster size mismatch");
    if (ensemble[i].hidden_dim() != hidden_size(d, hidden_ratio)) {
      throw ShapeError("ensemble autoencoder hidden size violates the hidden ratio");
    }
  }
  if (score_normalizer.dim() != k) throw ShapeError("score normalizer width != cluster count");
  output_ae.validate();
  if (output_ae.input_dim() != k) throw ShapeError("output autoencoder width != cluster count");
  if (output_ae.hidden_dim() != hidden_size(k, hidden_ratio)) {
    throw ShapeError("output autoencoder hidden size violates the hidden ratio");
  }
}

double score_normalized(const KitNetModel& model, std::span<const double> u) {
  require_dim(u.size(), model.input_dim(), "score input");
  const std::vector<double> e = ensemble_scores(model, u);
  const std::vector<double> z = model.score_normalizer.normalize(e);
  return nn::autoencoder_score(model.output_ae, z);
}

double score(const KitNetModel& model, std::span<const double> x) {
  require_dim(x.size(), model.input_dim(), "score input");
  return score_normalized(model, model.input_normalizer.normalize(x));
}

double score_gradient_normalized(const KitNetModel& model, std::span<const double> u,
                                 std::span<double> grad) {
  require_dim(u.size(), model.input_dim(), "score input");
  require_dim(grad.size(), u.size(), "score gradient");
  const std::size_t k = model.ensemble.size();

  std::vector<std::vector<double>> slice_grads(k);
  std::vector<double> e(k);
  std::vector<double> slice;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& cluster = model.feature_map.clusters[c];
    slice.resize(cluster.size());
    for (std::size_t j = 0; j < cluster.size(); ++j) slice[j] = u[cluster[j]];
    slice_grads[c].resize(cluster.size());
    e[c] = nn::autoencoder_score_gradient(model.ensemble[c], slice, slice_grads[c]);
  }
  const std::vector<double> z = model.score_normalizer.normalize(e);
  std::vector<double> dz(k);
  const double s = nn::autoencoder_score_gradient(model.output_ae, z, dz);

  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double upstream = dz[c] * model.score_normalizer.slope(c);
    const auto& cluster = model.feature_map.clusters[c];
    for (std::size_t j = 0; j < cluster.size(); ++j) grad[cluster[j]] += upstream * slice_grads[c][j];
  }
  return s;
}

double score_gradient(const KitNetModel& model, std::span<const double> x, std::span<double> grad) {
  require_dim(x.size(), model.input_dim(), "score input");
  const std::vector<double> u = model.input_normalizer.normalize(x);
  const double s = score_gradient_normalized(model, u, grad);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= model.input_normalizer.slope(i);
  return s;
}

KitNetScorer::KitNetScorer(const KitNetModel& model, InputSpace space)
    : model_(&model), space_(space) {}

std::size_t KitNetScorer::input_dim() const { return model_->input_dim(); }

double KitNetScorer::score(std::span<const double> x) const {
  return space_ == InputSpace::raw ? kitnet::score(*model_, x) : score_normalized(*model_, x);
}

double KitNetScorer::score_gradient(std::span<const double> x, std::span<double> grad) const {
  return space_ == InputSpace::raw ? kitnet::score_gradient(*model_, x, grad)
                                   : score_gradient_normalized(*model_, x, grad);
}

// --- classification ----------------------------------------------------------

ThresholdCalibration calibrate_threshold(double phi, double beta_threshold) {
  if (!std::isfinite(phi) || phi < 0.0) throw CalibrationError("phi must be finite and >= 0");
  if (!(beta_threshold >= 1.0) || !std::isfinite(beta_threshold)) {
    throw CalibrationError("beta_threshold must be >= 1.0, got " + std::to_string(beta_threshold));
  }
  return {phi, beta_threshold, phi * beta_threshold};
}

Logits logits(const KitNetModel& model, std::span<const double> x,
              const ThresholdCalibration& calib) {
  return logits_from_score(score(model, x), calib.threshold);
}

Label classify(const KitNetModel& model, std::span<const double> x,
               const ThresholdCalibration& calib) {
  return classify_score(score(model, x), calib.threshold);
}

// --- training ----------------------------------------------------------------

void TrainingConfig::validate() const {
  if (fm_window < 1 || train_window < 1) throw ConfigError("training windows must be >= 1");
  if (max_cluster_size < 1) throw ConfigError("max_cluster_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(hidden_ratio > 0.0 && hidden_ratio <= 1.0)) throw ConfigError("hidden_ratio must be in (0, 1]");
}

OnlineTrainer::OnlineTrainer(TrainingConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  scores_.reserve(cfg_.train_window);
}

bool OnlineTrainer::complete() const noexcept { return seen_ >= cfg_.fm_window + cfg_.train_window; }

const KitNetModel& OnlineTrainer::model() const {
  if (!ensemble_ready_) throw TrainingError("model is not built until the feature-map window ends");
  return model_;
}

std::optional<double> OnlineTrainer::feed(std::span<const double> x) {
  if (complete()) return std::nullopt;
  if (seen_ == 0) {
    if (x.empty()) throw TrainingError("training instances must have at least one feature");
    dim_ = x.size();
    model_.input_normalizer = MinMaxNormalizer(dim_);
  }
  require_dim(x.size(), dim_, "training instance");
  model_.input_normalizer.update(x);

  if (seen_ < cfg_.fm_window) {
    buffer_.append_row(x);
    ++seen_;
    if (seen_ == cfg_.fm_window) build_ensemble();
    return std::nullopt;
  }
  const double s = train_step(x);
  ++seen_;
  phi_ = scores_.empty() ? s : std::max(phi_, s);
  scores_.push_back(s);
  return s;
}

void OnlineTrainer::build_ensemble() {
  model_.hidden_ratio = cfg_.hidden_ratio;
  model_.feature_map = build_feature_map(buffer_, cfg_.max_cluster_size);
  buffer_ = Matrix();
  std::mt19937_64 rng(cfg_.seed);
  const std::size_t k = model_.feature_map.clusters.size();
  model_.ensemble.clear();
  for (const auto& cluster : model_.feature_map.clusters) {
    model_.ensemble.push_back(
        nn::Autoencoder::random(cluster.size(), hidden_size(cluster.size(), cfg_.hidden_ratio), rng));
  }
  model_.output_ae = nn::Autoencoder::random(k, hidden_size(k, cfg_.hidden_ratio), rng);
  model_.score_normalizer = MinMaxNormalizer(k);
  ensemble_ready_ = true;
}

double OnlineTrainer::train_step(std::span<const double> x) {
  const std::vector<double> u = model_.input_normalizer.normalize(x);
  const std::size_t k = model_.ensemble.size();
  std::vector<double> e(k);
  std::vector<double> slice;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& cluster = model_.feature_map.clusters[c];
    slice.resize(cluster.size());
    for (std::size_t j = 0; j < cluster.size(); ++j) slice[j] = u[cluster[j]];
    const nn::GradientBundle g = nn::backprop_params(model_.ensemble[c], slice);
    e[c] = g.score;
    nn::sgd_step(model_.ensemble[c], g, cfg_.learning_rate);
  }
  model_.score_normalizer.update(e);
  const std::vector<double> z = model_.score_normalizer.normalize(e);
  const nn::GradientBundle g = nn::backprop_params(model_.output_ae, z);
  nn::sgd_step(model_.output_ae, g, cfg_.learning_rate);
  return g.score;
}

KitNetModel OnlineTrainer::finish() && {
  if (!complete()) {
    throw TrainingError("training stream ended after " + std::to_string(seen_) +
                        " instances; need " + std::to_string(cfg_.fm_window + cfg_.train_window));
  }
  return std::move(model_);
}

TrainingResult train_online(const Matrix& stream, const TrainingConfig& cfg) {
  cfg.validate();
  const std::size_t needed = cfg.fm_window + cfg.train_window;
  if (stream.rows() < needed) {
    throw TrainingError("stream has " + std::to_string(stream.rows()) + " instances; need " +
                        std::to_string(needed) + " (fm_window + train_window)");
  }
  OnlineTrainer trainer(cfg);
  for (std::size_t r = 0; r < needed; ++r) trainer.feed(stream.row(r));
  TrainingResult result;
  result.phi = trainer.phi();
  result.training_scores = trainer.training_scores();
  result.model = std::move(trainer).finish();
  return result;
}

}  // namespace kitbench::kitnet
