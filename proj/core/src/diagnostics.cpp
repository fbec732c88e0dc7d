#include "cft/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "cft/data.hpp"

namespace cft {
namespace {

// class means for classes that are present; returns (means, class index per row)
std::pair<Matrix, std::vector<std::size_t>> class_means(const Matrix& z,
                                                        const Matrix& labels) {
  if (z.rows == 0) throw std::invalid_argument("class_means: empty input");
  const std::size_t k = labels.cols;
  Matrix means(k, z.cols);
  std::vector<std::size_t> counts(k, 0);
  std::vector<std::size_t> cls(z.rows);
  for (std::size_t i = 0; i < z.rows; ++i) {
    const std::size_t c = label_argmax(labels.row(i));
    cls[i] = c;
    ++counts[c];
    auto mr = means.row(c);
    auto zr = z.row(i);
    for (std::size_t j = 0; j < z.cols; ++j) mr[j] += zr[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    auto mr = means.row(c);
    for (std::size_t j = 0; j < z.cols; ++j) mr[j] /= static_cast<double>(counts[c]);
  }
  return {std::move(means), std::move(cls)};
}

}  // namespace

double tightness(const Matrix& z, const Matrix& labels) {
  auto [means, cls] = class_means(z, labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    auto zr = z.row(i);
    auto mr = means.row(cls[i]);
    for (std::size_t j = 0; j < z.cols; ++j) {
      const double d = zr[j] - mr[j];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(z.rows);
}

double feature_entropy_estimate(const Matrix& z) {
  const std::size_t n = z.rows;
  if (n < 2) throw std::invalid_argument("feature_entropy_estimate: need n >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double d2 = 0.0;
      auto a = z.row(i);
      auto b = z.row(k);
      for (std::size_t j = 0; j < z.cols; ++j) {
        const double d = a[j] - b[j];
        d2 += d * d;
      }
      sum += std::log(std::max(d2, 1e-12));
    }
  }
  return static_cast<double>(z.cols) * sum /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

double class_separation(const Matrix& z, const Matrix& labels) {
  auto [means, cls] = class_means(z, labels);
  std::vector<char> present(labels.cols, 0);
  for (std::size_t c : cls) present[c] = 1;
  double best = -1.0;
  for (std::size_t a = 0; a < labels.cols; ++a) {
    if (!present[a]) continue;
    for (std::size_t b = a + 1; b < labels.cols; ++b) {
      if (!present[b]) continue;
      double d2 = 0.0;
      for (std::size_t j = 0; j < z.cols; ++j) {
        const double d = means.at(a, j) - means.at(b, j);
        d2 += d * d;
      }
      const double d = std::sqrt(d2);
      if (best < 0.0 || d < best) best = d;
    }
  }
  if (best < 0.0) {
    throw std::invalid_argument("class_separation: need >= 2 classes present");
  }
  return best;
}

double accuracy(const Matrix& logits, const Matrix& labels) {
  if (!logits.same_shape(labels)) {
    throw std::invalid_argument("accuracy: shape mismatch");
  }
  if (logits.rows == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    if (label_argmax(logits.row(i)) == label_argmax(labels.row(i))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows);
}

std::vector<double> finite_diff_grad(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::vector<double> params, double h) {
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = params[i];
    params[i] = orig + h;
    const double fp = loss_fn(params);
    params[i] = orig - h;
    const double fm = loss_fn(params);
    params[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double grad_rel_error(std::span<const double> analytic,
                      std::span<const double> numeric) {
  double diff2 = 0.0, na2 = 0.0, nn2 = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff2 += d * d;
    na2 += analytic[i] * analytic[i];
    nn2 += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(na2) + std::sqrt(nn2);
  if (denom < 1e-10) return std::sqrt(diff2) < 1e-8 ? 0.0 : 1.0;
  return std::sqrt(diff2) / denom;
}

TrendReport theorem1_trend_report(
    const std::vector<std::vector<MetricsRecord>>& runs_with_con,
    const std::vector<std::vector<MetricsRecord>>& runs_ce_only) {
  if (runs_with_con.empty() || runs_ce_only.empty()) {
    throw std::invalid_argument("theorem1_trend_report: empty run set");
  }
  if (runs_with_con.size() != runs_ce_only.size()) {
    throw std::invalid_argument("theorem1_trend_report: run-set size mismatch");
  }
  const std::size_t epochs = runs_with_con.front().size();
  for (const auto& r : runs_with_con) {
    if (r.size() != epochs) throw std::invalid_argument("theorem1_trend_report: epoch mismatch");
  }
  for (const auto& r : runs_ce_only) {
    if (r.size() != epochs) throw std::invalid_argument("theorem1_trend_report: epoch mismatch");
  }
  TrendReport rep;
  const double inv = 1.0 / static_cast<double>(runs_with_con.size());
  for (const auto& r : runs_with_con) {
    rep.tightness_con += inv * r.back().tightness;
    rep.entropy_con += inv * r.back().feature_entropy;
  }
  for (const auto& r : runs_ce_only) {
    rep.tightness_ce += inv * r.back().tightness;
    rep.entropy_ce += inv * r.back().feature_entropy;
  }
  rep.tightness_lower = rep.tightness_con < rep.tightness_ce;
  rep.entropy_higher = rep.entropy_con > rep.entropy_ce;
  return rep;
}

}  // namespace cft
