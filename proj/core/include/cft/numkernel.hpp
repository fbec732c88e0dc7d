#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cft {

// Dense row-major matrix of doubles. Row i holds the feature vector of
// sample i. All reductions over it use fixed left-to-right order so that
// repeated runs are bitwise identical.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) {
    return {data.data() + i * cols, cols};
  }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

// True iff every entry is finite.
bool all_finite(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Row-wise l2 normalization with clamped denominator:
// r' = r / max(||r||, eps). Zero rows pass through unchanged.
// Rejects non-finite input, naming the offending row.
Matrix l2_normalize(const Matrix& m, double eps = 1e-12);

// S[i][j] = cos(row i, row j); normalizes internally.
Matrix cosine_sim_matrix(const Matrix& m);

// max(xs) + log(sum exp(xs - max)); overflow-free. Errors on empty input.
double log_sum_exp(std::span<const double> xs);

}  // namespace cft
