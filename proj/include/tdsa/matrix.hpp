#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tdsa {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<double> row_span(std::size_t i) { return {row(i), cols}; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const Matrix&) const = default;
};

}  // namespace tdsa
