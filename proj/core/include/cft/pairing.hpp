#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cft/numkernel.hpp"
#include "cft/rng.hpp"

namespace cft {

// Per-anchor positive set P_i and contrast candidate set A_i over a pool of
// original + generated features. Anchors are the first `anchor_count()`
// pool entries; generated features are never anchors.
struct PairSets {
  std::vector<std::vector<std::size_t>> positives;   // P_i
  std::vector<std::vector<std::size_t>> candidates;  // A_i
  std::size_t pool_size = 0;

  std::size_t anchor_count() const { return positives.size(); }
};

// P_i = same-class others, A_i = all others. Labels must be one-hot.
PairSets build_base_pairs(const Matrix& labels);

// argmin of sim[i][j] over j in P_i; smallest-index tie-break.
std::optional<std::size_t> hardest_positive(const Matrix& sim,
                                            const Matrix& labels,
                                            std::size_t i);

// argmax of sim[i][j] over j != i with a different class; smallest-index
// tie-break.
std::optional<std::size_t> hardest_negative(const Matrix& sim,
                                            const Matrix& labels,
                                            std::size_t i);

// max(Beta(alpha, alpha) draw, clip_min). The Beta draw uses two
// Gamma(alpha, 1) draws g1, g2 with u = g1 / (g1 + g2).
double sample_lambda(double alpha, double clip_min, RngStream& rng);

struct GeneratedPair {
  enum class Kind { HardPositive, HardNegative };

  std::vector<double> feature;  // lives in encoder-feature space
  std::vector<double> label;    // convex mix, on the K-simplex
  Kind kind;
  std::size_t anchor;
  double lambda;
  std::pair<std::size_t, std::size_t> constituents;  // (a, b)
  double weight_a;  // feature = weight_a * z_a + (1 - weight_a) * z_b
};

// z+ = lambda*z_hp + (1-lambda)*z_hn, same mix for the labels.
GeneratedPair gen_hard_positive(std::span<const double> z_hp,
                                std::span<const double> y_hp,
                                std::span<const double> z_hn,
                                std::span<const double> y_hn, double lambda,
                                std::size_t anchor,
                                std::pair<std::size_t, std::size_t> constituents);

// z- = (1-lambda)*z_i + lambda*z_n, same mix for the labels. lambda must
// already be clipped to >= lambda_n upstream.
GeneratedPair gen_hard_negative(std::span<const double> z_i,
                                std::span<const double> y_i,
                                std::span<const double> z_n,
                                std::span<const double> y_n, double lambda,
                                std::size_t anchor,
                                std::pair<std::size_t, std::size_t> constituents);

// Pool-extends the base sets: a hard positive of anchor i (at pool index
// n + t) joins P_i and A_i; a hard negative joins A_i only. Generated
// entries appear only in the sets of their own anchor.
PairSets augment_pair_sets(const PairSets& base,
                           const std::vector<GeneratedPair>& generated);

}  // namespace cft
