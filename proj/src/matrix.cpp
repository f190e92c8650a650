#include "kitbench/matrix.hpp"

#include <string>

#include "kitbench/errors.hpp"

namespace kitbench {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                     std::to_string(rows * cols));
  }
}

void Matrix::append_row(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = row.size();
  } else if (row.size() != cols_) {
    throw ShapeError("row width " + std::to_string(row.size()) + " does not match matrix width " +
                     std::to_string(cols_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
}

}  // namespace kitbench
