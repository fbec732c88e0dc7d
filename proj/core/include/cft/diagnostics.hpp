#pragma once

#include <functional>
#include <vector>

#include "cft/numkernel.hpp"

namespace cft {

struct MetricsRecord {
  int epoch = 0;
  double loss_total = 0.0;
  double loss_ce_mixed = 0.0;
  double loss_con_focal = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double tightness = 0.0;
  double feature_entropy = 0.0;
  double lr = 0.0;
};

// (1/n) sum_i ||z_i - c_{y_i}||^2 with c_k the hard class mean.
double tightness(const Matrix& z, const Matrix& labels);

// H(Z) = d/(n(n-1)) sum_{i != k} log ||z_i - z_k||^2; squared distances
// floored at 1e-12 before the log so coincident rows stay finite.
double feature_entropy_estimate(const Matrix& z);

// Minimum pairwise distance between class means; needs >= 2 classes present.
double class_separation(const Matrix& z, const Matrix& labels);

// Fraction of rows with argmax(logits) == argmax(label); ties break to the
// smallest index on both sides.
double accuracy(const Matrix& logits, const Matrix& labels);

// Central differences (f(p+h e) - f(p-h e)) / 2h per coordinate.
std::vector<double> finite_diff_grad(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::vector<double> params, double h = 1e-5);

// ||a - f||_2 / max(||a|| + ||f||, floor); 0 when both are ~zero.
double grad_rel_error(std::span<const double> analytic,
                      std::span<const double> numeric);

// Final-epoch group means of tightness and feature entropy, with the two
// directional comparisons (contrastive runs tighter, higher entropy).
struct TrendReport {
  double tightness_con = 0.0;
  double tightness_ce = 0.0;
  double entropy_con = 0.0;
  double entropy_ce = 0.0;
  bool tightness_lower = false;
  bool entropy_higher = false;
};
TrendReport theorem1_trend_report(
    const std::vector<std::vector<MetricsRecord>>& runs_with_con,
    const std::vector<std::vector<MetricsRecord>>& runs_ce_only);

}  // namespace cft
