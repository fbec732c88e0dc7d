#pragma once

#include <vector>

#include "cft/numkernel.hpp"
#include "cft/pairing.hpp"

namespace cft {

struct LossOutput {
  double value = 0.0;
  Matrix grad;  // dLoss/dInput, same shape as the differentiated input
};

// Per-anchor softmax over A_i. Row i of `p` is zero outside A_i; anchors
// with empty A_i are marked inactive rather than erroring.
struct ProbMatrix {
  Matrix p;                   // anchors x pool
  std::vector<char> active;   // |A_i| > 0
};

// p[i][j] = exp(v_i.v_j / tau) / sum_{k in A_i} exp(v_i.v_k / tau),
// computed through log_sum_exp.
ProbMatrix contrast_prob_matrix(const Matrix& v_pool, const PairSets& pairs,
                                double tau);

// L_con = -(1/n') sum_i (1/|P_i|) sum_{j in P_i} log p_ij, averaged over
// the n' anchors with at least one positive. Gradient is with respect to
// every pool row of v.
LossOutput supervised_contrastive(const Matrix& v_pool, const PairSets& pairs,
                                  double tau);

// Focal variant: each term weighted by (1 - p_ij); the weight is
// differentiated through, no stop-gradient.
LossOutput focal_contrastive(const Matrix& v_pool, const PairSets& pairs,
                             double tau);

// Mean over rows of -sum_k target_k * log softmax(logits)_k.
// grad = (softmax - target) / n per row.
LossOutput soft_cross_entropy(const Matrix& logits, const Matrix& targets);

// L_ce^m = CE(originals) + CE(generated set B), each term normalized by its
// own count. Empty B contributes 0.
struct MixedCeOutput {
  double value = 0.0;
  Matrix grad_orig;
  Matrix grad_gen;
};
MixedCeOutput mixed_ce(const Matrix& logits_orig, const Matrix& labels_orig,
                       const Matrix& logits_gen, const Matrix& labels_gen);

// value = ce + eta * con; gradients combine linearly at the call site.
double total_objective(double ce_value, double con_value, double eta);

}  // namespace cft
