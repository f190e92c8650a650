#include "kitbench/nn.hpp"

#include <cmath>
#include <string>

#include "kitbench/errors.hpp"
#include "kitbench/kernels.hpp"

namespace kitbench::nn {
namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void apply_activation(Activation act, std::span<double> v) {
  if (act == Activation::identity) return;
  for (double& z : v) z = sigmoid(z);
}

// Derivative expressed through the activation's output.
double activation_slope(Activation act, double out) {
  return act == Activation::sigmoid ? out * (1.0 - out) : 1.0;
}

bool all_finite(std::span<const double> v) {
  for (double d : v) {
    if (!std::isfinite(d)) return false;
  }
  return true;
}

struct ForwardTrace {
  std::vector<double> hidden;
  std::vector<double> output;
};

ForwardTrace trace_forward(const Autoencoder& ae, std::span<const double> x) {
  ForwardTrace t;
  t.hidden.resize(ae.hidden_dim());
  t.output.resize(ae.input_dim());
  dense_forward(ae.encoder, x, t.hidden);
  dense_forward(ae.decoder, t.hidden, t.output);
  return t;
}

// Backward pass through both layers given the error signal d RMSE / d output.
// Fills delta_out (decoder pre-activation gradient) and delta_hidden.
void backward_deltas(const Autoencoder& ae, const ForwardTrace& t, std::span<const double> d_output,
                     std::vector<double>& delta_out, std::vector<double>& delta_hidden) {
  const auto& k = kernels::active();
  delta_out.resize(t.output.size());
  for (std::size_t i = 0; i < t.output.size(); ++i) {
    delta_out[i] = d_output[i] * activation_slope(ae.decoder.activation, t.output[i]);
  }
  delta_hidden.resize(t.hidden.size());
  k.gemv_transposed(ae.decoder.weights.values().data(), ae.decoder.out_dim(), ae.decoder.in_dim(),
                    delta_out.data(), delta_hidden.data());
  for (std::size_t j = 0; j < t.hidden.size(); ++j) {
    delta_hidden[j] *= activation_slope(ae.encoder.activation, t.hidden[j]);
  }
}

}  // namespace

void DenseLayer::validate() const {
  if (biases.size() != weights.rows()) {
    throw ShapeError("dense layer has " + std::to_string(weights.rows()) + " weight rows but " +
                     std::to_string(biases.size()) + " biases");
  }
  if (!all_finite(weights.values()) || !all_finite(biases)) {
    throw DomainError("dense layer contains non-finite parameters");
  }
}

DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation activation,
                            std::mt19937_64& rng) {
  if (in_dim == 0 || out_dim == 0) throw ShapeError("dense layer dimensions must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseLayer layer{Matrix(out_dim, in_dim), std::vector<double>(out_dim, 0.0), activation};
  for (double& w : layer.weights.values()) w = dist(rng);
  return layer;
}

void dense_forward(const DenseLayer& layer, std::span<const double> input, std::span<double> out) {
  require_dim(input.size(), layer.in_dim(), "dense_forward input");
  require_dim(out.size(), layer.out_dim(), "dense_forward output");
  kernels::active().gemv(layer.weights.values().data(), layer.out_dim(), layer.in_dim(),
                         input.data(), layer.biases.data(), out.data());
  apply_activation(layer.activation, out);
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> input) {
  std::vector<double> out(layer.out_dim());
  dense_forward(layer, input, out);
  return out;
}

void Autoencoder::validate() const {
  encoder.validate();
  decoder.validate();
  if (decoder.in_dim() != encoder.out_dim()) {
    throw ShapeError("autoencoder decoder input does not match encoder output");
  }
  if (decoder.out_dim() != encoder.in_dim()) {
    throw ShapeError("autoencoder must reconstruct to its input dimension");
  }
}

Autoencoder Autoencoder::random(std::size_t input_dim, std::size_t hidden_dim,
                                std::mt19937_64& rng, Activation activation) {
  Autoencoder ae;
  ae.encoder = make_dense_layer(input_dim, hidden_dim, activation, rng);
  ae.decoder = make_dense_layer(hidden_dim, input_dim, activation, rng);
  return ae;
}

std::vector<double> autoencoder_forward(const Autoencoder& ae, std::span<const double> x) {
  require_dim(x.size(), ae.input_dim(), "autoencoder input");
  return trace_forward(ae, x).output;
}

double reconstruction_rmse(std::span<const double> x, std::span<const double> x_hat) {
  require_dim(x_hat.size(), x.size(), "reconstruction");
  if (x.empty()) throw DomainError("RMSE of an empty vector is undefined");
  return std::sqrt(kernels::squared_distance(x, x_hat) / static_cast<double>(x.size()));
}

void rmse_gradient(std::span<const double> x, std::span<const double> x_hat, std::span<double> dx) {
  require_dim(dx.size(), x.size(), "rmse gradient");
  const double r = reconstruction_rmse(x, x_hat);
  if (r <= kRmseGradientFloor) {
    for (double& d : dx) d = 0.0;
    return;
  }
  const double scale = 1.0 / (static_cast<double>(x.size()) * r);
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = (x[i] - x_hat[i]) * scale;
}

double autoencoder_score(const Autoencoder& ae, std::span<const double> x) {
  return reconstruction_rmse(x, autoencoder_forward(ae, x));
}

GradientBundle backprop_params(const Autoencoder& ae, std::span<const double> x) {
  require_dim(x.size(), ae.input_dim(), "autoencoder input");
  const auto& k = kernels::active();
  const ForwardTrace t = trace_forward(ae, x);

  GradientBundle g;
  g.layers.push_back({Matrix(ae.encoder.out_dim(), ae.encoder.in_dim()),
                      std::vector<double>(ae.encoder.out_dim(), 0.0)});
  g.layers.push_back({Matrix(ae.decoder.out_dim(), ae.decoder.in_dim()),
                      std::vector<double>(ae.decoder.out_dim(), 0.0)});
  g.input_grad.assign(x.size(), 0.0);
  g.score = reconstruction_rmse(x, t.output);
  if (g.score <= kRmseGradientFloor) return g;

  std::vector<double> direct(x.size());
  rmse_gradient(x, t.output, direct);
  std::vector<double> d_output(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d_output[i] = -direct[i];

  std::vector<double> delta_out;
  std::vector<double> delta_hidden;
  backward_deltas(ae, t, d_output, delta_out, delta_hidden);

  auto& dec = g.layers[1];
  k.rank1_update(dec.weights.values().data(), dec.weights.rows(), dec.weights.cols(), 1.0,
                 delta_out.data(), t.hidden.data());
  dec.biases = delta_out;

  auto& enc = g.layers[0];
  k.rank1_update(enc.weights.values().data(), enc.weights.rows(), enc.weights.cols(), 1.0,
                 delta_hidden.data(), x.data());
  enc.biases = delta_hidden;

  k.gemv_transposed(ae.encoder.weights.values().data(), ae.encoder.out_dim(), ae.encoder.in_dim(),
                    delta_hidden.data(), g.input_grad.data());
  k.axpy(1.0, direct.data(), g.input_grad.data(), x.size());
  return g;
}

double autoencoder_score_gradient(const Autoencoder& ae, std::span<const double> x,
                                  std::span<double> dx) {
  require_dim(x.size(), ae.input_dim(), "autoencoder input");
  require_dim(dx.size(), x.size(), "autoencoder input gradient");
  const auto& k = kernels::active();
  const ForwardTrace t = trace_forward(ae, x);
  const double score = reconstruction_rmse(x, t.output);
  if (score <= kRmseGradientFloor) {
    for (double& d : dx) d = 0.0;
    return score;
  }
  std::vector<double> direct(x.size());
  rmse_gradient(x, t.output, direct);
  std::vector<double> d_output(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d_output[i] = -direct[i];
  std::vector<double> delta_out;
  std::vector<double> delta_hidden;
  backward_deltas(ae, t, d_output, delta_out, delta_hidden);
  k.gemv_transposed(ae.encoder.weights.values().data(), ae.encoder.out_dim(), ae.encoder.in_dim(),
                    delta_hidden.data(), dx.data());
  k.axpy(1.0, direct.data(), dx.data(), x.size());
  return score;
}

void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate) {
  require_dim(grads.size(), params.size(), "sgd gradient");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be finite and non-negative");
  }
  if (!all_finite(grads)) throw TrainingError("non-finite gradient in SGD step");
  kernels::axpy(-learning_rate, grads, params);
}

void sgd_step(Autoencoder& ae, const GradientBundle& grads, double learning_rate) {
  if (grads.layers.size() != 2) throw ShapeError("autoencoder gradient must have two layers");
  DenseLayer* layers[2] = {&ae.encoder, &ae.decoder};
  for (std::size_t l = 0; l < 2; ++l) {
    if (grads.layers[l].weights.rows() != layers[l]->weights.rows() ||
        grads.layers[l].weights.cols() != layers[l]->weights.cols()) {
      throw ShapeError("gradient shape does not mirror the autoencoder");
    }
    if (!all_finite(grads.layers[l].weights.values()) || !all_finite(grads.layers[l].biases)) {
      throw TrainingError("non-finite gradient in SGD step");
    }
  }
  for (std::size_t l = 0; l < 2; ++l) {
    sgd_step(layers[l]->weights.values(), grads.layers[l].weights.values(), learning_rate);
    sgd_step(layers[l]->biases, grads.layers[l].biases, learning_rate);
  }
}

std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x,
                                               double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe);
    probe[i] = saved - h;
    const double down = f(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace kitbench::nn
