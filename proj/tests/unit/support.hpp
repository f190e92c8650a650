#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kitbench/data_io.hpp"
#include "kitbench/kitnet.hpp"

namespace kitbench::testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

// Small trained model: 12 features over three correlated groups of four.
inline io::LabeledDataset small_dataset(std::uint64_t seed = 7, double shift = 4.0) {
  io::SyntheticConfig cfg;
  cfg.n_features = 12;
  cfg.n_benign = 600;
  cfg.n_malicious = 100;
  cfg.latent_dim = 3;
  cfg.noise = 0.2;
  cfg.seed = seed;
  cfg.malicious_shift = io::SyntheticConfig::leading_shift(12, shift, 2);
  return io::generate_synthetic(cfg);
}

inline kitnet::TrainingConfig small_training_config() {
  kitnet::TrainingConfig cfg;
  cfg.fm_window = 200;
  cfg.train_window = 400;
  cfg.max_cluster_size = 4;
  cfg.seed = 3;
  return cfg;
}

inline kitnet::TrainingResult small_model(std::uint64_t seed = 7) {
  const io::LabeledDataset data = small_dataset(seed);
  Matrix benign(0, data.rows.cols());
  for (std::size_t r = 0; r < data.rows.rows(); ++r) {
    if (data.labels[r] == Label::benign) benign.append_row(data.rows.row(r));
  }
  return kitnet::train_online(benign, small_training_config());
}

}  // namespace kitbench::testing
