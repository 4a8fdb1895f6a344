#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "promocast/error.hpp"

namespace promocast {

// Dense row-major matrix of model inputs.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  void append_row(std::span<const double> values) {
    if (rows == 0 && cols == 0) cols = values.size();
    if (values.size() != cols) throw InvalidArgument("row width mismatch");
    data.insert(data.end(), values.begin(), values.end());
    ++rows;
  }

  bool operator==(const Matrix&) const = default;
};

}  // namespace promocast
