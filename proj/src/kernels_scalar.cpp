#include "kitbench/kernels.hpp"

namespace kitbench::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* b,
          double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(w + r * cols, x, cols) + b[r];
}

void gemv_transposed(const double* w, std::size_t rows, std::size_t cols, const double* g,
                     double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += g[r] * wr[c];
  }
}

void rank1_update(double* w, std::size_t rows, std::size_t cols, double alpha, const double* u,
                  const double* v) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double scale = alpha * u[r];
    double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) wr[c] += scale * v[c];
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

const KernelTable kTable{Isa::scalar, dot, gemv, gemv_transposed, rank1_update, axpy, squared_distance};

}  // namespace kitbench::kernels::scalar
