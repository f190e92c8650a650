#pragma once

// Minimal dense-network numerics for autoencoders: forward evaluation,
// parameter gradients for online training, input gradients for attacks,
// and a central-difference oracle. All numerics are double precision.

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "kitbench/matrix.hpp"

namespace kitbench::nn {

enum class Activation { sigmoid, identity };

/// Below this RMSE the reconstruction is treated as exact and its gradient is zero.
inline constexpr double kRmseGradientFloor = 1e-12;

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  std::vector<double> biases;
  Activation activation = Activation::sigmoid;

  std::size_t in_dim() const noexcept { return weights.cols(); }
  std::size_t out_dim() const noexcept { return weights.rows(); }

  /// Throws ShapeError on inconsistent dims, DomainError on non-finite entries.
  void validate() const;

  bool operator==(const DenseLayer&) const = default;
};

/// Weights uniform in [-1/sqrt(in_dim), 1/sqrt(in_dim)], zero biases.
DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation activation,
                            std::mt19937_64& rng);

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> input);
void dense_forward(const DenseLayer& layer, std::span<const double> input, std::span<double> out);

struct Autoencoder {
  DenseLayer encoder;
  DenseLayer decoder;

  std::size_t input_dim() const noexcept { return encoder.in_dim(); }
  std::size_t hidden_dim() const noexcept { return encoder.out_dim(); }

  void validate() const;

  static Autoencoder random(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng,
                            Activation activation = Activation::sigmoid);

  bool operator==(const Autoencoder&) const = default;
};

std::vector<double> autoencoder_forward(const Autoencoder& ae, std::span<const double> x);

/// sqrt(sum (x_i - x_hat_i)^2 / n). Empty input is a DomainError.
double reconstruction_rmse(std::span<const double> x, std::span<const double> x_hat);

/// d RMSE(x, x_hat) / dx with x_hat held fixed; the gradient wrt x_hat is the negation.
/// Zero when RMSE <= kRmseGradientFloor.
void rmse_gradient(std::span<const double> x, std::span<const double> x_hat, std::span<double> dx);

/// RMSE(x, ae(x)): the anomaly score of a single autoencoder.
double autoencoder_score(const Autoencoder& ae, std::span<const double> x);

struct LayerGradient {
  Matrix weights;
  std::vector<double> biases;
};

/// Gradients of RMSE(x, ae(x)). `layers` is {encoder, decoder}.
struct GradientBundle {
  std::vector<LayerGradient> layers;
  std::vector<double> input_grad;
  double score = 0.0;
};

/// Full backward pass: parameter gradients and the input gradient (through the
/// direct x term and through the network).
GradientBundle backprop_params(const Autoencoder& ae, std::span<const double> x);

/// Input gradient of RMSE(x, ae(x)) only; returns the score.
double autoencoder_score_gradient(const Autoencoder& ae, std::span<const double> x,
                                  std::span<double> dx);

/// params -= learning_rate * grads. Throws DomainError on negative rate,
/// TrainingError on a non-finite gradient.
void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate);
void sgd_step(Autoencoder& ae, const GradientBundle& grads, double learning_rate);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x,
                                               double h);

}  // namespace kitbench::nn
