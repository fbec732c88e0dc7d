#include "cft/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace cft {

ProbMatrix contrast_prob_matrix(const Matrix& v_pool, const PairSets& pairs,
                                double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  const std::size_t n = pairs.anchor_count();
  ProbMatrix pm;
  pm.p = Matrix(n, pairs.pool_size);
  pm.active.assign(n, 0);
  std::vector<double> scores;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cand = pairs.candidates[i];
    if (cand.empty()) continue;
    pm.active[i] = 1;
    scores.clear();
    for (std::size_t k : cand) {
      scores.push_back(dot(v_pool.row(i), v_pool.row(k)) / tau);
    }
    const double lse = log_sum_exp(scores);
    for (std::size_t t = 0; t < cand.size(); ++t) {
      pm.p.at(i, cand[t]) = std::exp(scores[t] - lse);
    }
  }
  return pm;
}

namespace {

// Shared core of the two contrastive losses. The focal variant weights
// each positive term by (1 - p_ij) and differentiates the weight through.
LossOutput contrastive_impl(const Matrix& v_pool, const PairSets& pairs,
                            double tau, bool focal) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  const std::size_t n = pairs.anchor_count();
  LossOutput out;
  out.grad = Matrix(v_pool.rows, v_pool.cols);

  std::size_t n_active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pairs.positives[i].empty()) ++n_active;
  }
  if (n_active == 0) return out;  // loss 0, grad 0 by convention
  const double inv_n = 1.0 / static_cast<double>(n_active);

  std::vector<double> scores, logp, p;
  std::vector<char> in_p;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pos = pairs.positives[i];
    if (pos.empty()) continue;
    const auto& cand = pairs.candidates[i];
    const double inv_pi = 1.0 / static_cast<double>(pos.size());

    scores.clear();
    for (std::size_t k : cand) {
      scores.push_back(dot(v_pool.row(i), v_pool.row(k)) / tau);
    }
    const double lse = log_sum_exp(scores);
    logp.assign(scores.size(), 0.0);
    p.assign(scores.size(), 0.0);
    for (std::size_t t = 0; t < scores.size(); ++t) {
      logp[t] = scores[t] - lse;
      p[t] = std::exp(logp[t]);
    }
    in_p.assign(cand.size(), 0);
    for (std::size_t t = 0; t < cand.size(); ++t) {
      for (std::size_t j : pos) {
        if (cand[t] == j) {
          in_p[t] = 1;
          break;
        }
      }
    }

    double loss_i = 0.0;
    std::vector<double> ds(cand.size(), 0.0);  // dL_i/ds_ik
    if (!focal) {
      for (std::size_t t = 0; t < cand.size(); ++t) {
        if (in_p[t]) loss_i -= inv_pi * logp[t];
      }
      for (std::size_t t = 0; t < cand.size(); ++t) {
        ds[t] = p[t] - (in_p[t] ? inv_pi : 0.0);
      }
    } else {
      // w_j = (1 - p_j) - p_j * log p_j
      double w_sum = 0.0;
      std::vector<double> w(cand.size(), 0.0);
      for (std::size_t t = 0; t < cand.size(); ++t) {
        if (!in_p[t]) continue;
        loss_i -= inv_pi * (1.0 - p[t]) * logp[t];
        w[t] = (1.0 - p[t]) - p[t] * logp[t];
        w_sum += w[t];
      }
      for (std::size_t t = 0; t < cand.size(); ++t) {
        ds[t] = -inv_pi * ((in_p[t] ? w[t] : 0.0) - p[t] * w_sum);
      }
    }

    out.value += inv_n * loss_i;
    auto gi = out.grad.row(i);
    auto vi = v_pool.row(i);
    for (std::size_t t = 0; t < cand.size(); ++t) {
      const double c = inv_n * ds[t] / tau;
      if (c == 0.0) continue;
      const std::size_t k = cand[t];
      auto vk = v_pool.row(k);
      auto gk = out.grad.row(k);
      for (std::size_t j = 0; j < v_pool.cols; ++j) {
        gi[j] += c * vk[j];
        gk[j] += c * vi[j];
      }
    }
  }
  return out;
}

}  // namespace

LossOutput supervised_contrastive(const Matrix& v_pool, const PairSets& pairs,
                                  double tau) {
  return contrastive_impl(v_pool, pairs, tau, false);
}

LossOutput focal_contrastive(const Matrix& v_pool, const PairSets& pairs,
                             double tau) {
  return contrastive_impl(v_pool, pairs, tau, true);
}

LossOutput soft_cross_entropy(const Matrix& logits, const Matrix& targets) {
  if (!logits.same_shape(targets)) {
    throw std::invalid_argument("soft_cross_entropy: shape mismatch");
  }
  LossOutput out;
  out.grad = Matrix(logits.rows, logits.cols);
  if (logits.rows == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    auto lr = logits.row(i);
    auto tr = targets.row(i);
    const double lse = log_sum_exp(lr);
    auto gr = out.grad.row(i);
    for (std::size_t k = 0; k < logits.cols; ++k) {
      out.value -= inv_n * tr[k] * (lr[k] - lse);
      gr[k] = inv_n * (std::exp(lr[k] - lse) - tr[k]);
    }
  }
  return out;
}

MixedCeOutput mixed_ce(const Matrix& logits_orig, const Matrix& labels_orig,
                       const Matrix& logits_gen, const Matrix& labels_gen) {
  MixedCeOutput out;
  auto orig = soft_cross_entropy(logits_orig, labels_orig);
  out.value = orig.value;
  out.grad_orig = std::move(orig.grad);
  if (logits_gen.rows > 0) {
    auto gen = soft_cross_entropy(logits_gen, labels_gen);
    out.value += gen.value;
    out.grad_gen = std::move(gen.grad);
  } else {
    out.grad_gen = Matrix(0, logits_orig.cols);
  }
  return out;
}

double total_objective(double ce_value, double con_value, double eta) {
  return ce_value + eta * con_value;
}

}  // namespace cft
