#include "cft/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cft {

bool all_finite(const Matrix& m) {
  for (double x : m.data) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix l2_normalize(const Matrix& m, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("l2_normalize: eps must be > 0");
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto r = m.row(i);
    for (double x : r) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("l2_normalize: non-finite entry in row " +
                                    std::to_string(i));
      }
    }
    const double inv = 1.0 / std::max(norm2(r), eps);
    auto o = out.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) o[j] = r[j] * inv;
  }
  return out;
}

Matrix cosine_sim_matrix(const Matrix& m) {
  const Matrix u = l2_normalize(m);
  Matrix s(m.rows, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.rows; ++j) {
      s.at(i, j) = dot(u.row(i), u.row(j));
    }
  }
  return s;
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace cft
