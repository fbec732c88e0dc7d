#include "cft/pairing.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cft/data.hpp"

namespace cft {

PairSets build_base_pairs(const Matrix& labels) {
  const std::size_t n = labels.rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_one_hot(labels.row(i))) {
      throw std::invalid_argument("build_base_pairs: label " +
                                  std::to_string(i) + " is not one-hot");
    }
  }
  PairSets ps;
  ps.positives.resize(n);
  ps.candidates.resize(n);
  ps.pool_size = n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ci = label_argmax(labels.row(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      ps.candidates[i].push_back(j);
      if (label_argmax(labels.row(j)) == ci) ps.positives[i].push_back(j);
    }
  }
  return ps;
}

std::optional<std::size_t> hardest_positive(const Matrix& sim,
                                            const Matrix& labels,
                                            std::size_t i) {
  const std::size_t ci = label_argmax(labels.row(i));
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < sim.rows; ++j) {
    if (j == i || label_argmax(labels.row(j)) != ci) continue;
    if (!best || sim.at(i, j) < sim.at(i, *best)) best = j;
  }
  return best;
}

std::optional<std::size_t> hardest_negative(const Matrix& sim,
                                            const Matrix& labels,
                                            std::size_t i) {
  const std::size_t ci = label_argmax(labels.row(i));
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < sim.rows; ++j) {
    if (j == i || label_argmax(labels.row(j)) == ci) continue;
    if (!best || sim.at(i, j) > sim.at(i, *best)) best = j;
  }
  return best;
}

double sample_lambda(double alpha, double clip_min, RngStream& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_lambda: alpha must be > 0");
  const double g1 = rng.next_gamma(alpha);
  const double g2 = rng.next_gamma(alpha);
  const double denom = g1 + g2;
  const double u = denom > 0.0 ? g1 / denom : 0.5;
  return std::max(u, clip_min);
}

namespace {

GeneratedPair make_mix(std::span<const double> z_a, std::span<const double> y_a,
                       std::span<const double> z_b, std::span<const double> y_b,
                       double weight_a, GeneratedPair::Kind kind,
                       std::size_t anchor, double lambda,
                       std::pair<std::size_t, std::size_t> constituents) {
  if (z_a.size() != z_b.size() || y_a.size() != y_b.size()) {
    throw std::invalid_argument("generated pair: dimension mismatch");
  }
  GeneratedPair g;
  g.kind = kind;
  g.anchor = anchor;
  g.lambda = lambda;
  g.constituents = constituents;
  g.weight_a = weight_a;
  g.feature.resize(z_a.size());
  for (std::size_t j = 0; j < z_a.size(); ++j) {
    g.feature[j] = weight_a * z_a[j] + (1.0 - weight_a) * z_b[j];
  }
  g.label.resize(y_a.size());
  for (std::size_t j = 0; j < y_a.size(); ++j) {
    g.label[j] = weight_a * y_a[j] + (1.0 - weight_a) * y_b[j];
  }
  return g;
}

}  // namespace

GeneratedPair gen_hard_positive(std::span<const double> z_hp,
                                std::span<const double> y_hp,
                                std::span<const double> z_hn,
                                std::span<const double> y_hn, double lambda,
                                std::size_t anchor,
                                std::pair<std::size_t, std::size_t> constituents) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("gen_hard_positive: lambda out of [0,1]");
  }
  return make_mix(z_hp, y_hp, z_hn, y_hn, lambda,
                  GeneratedPair::Kind::HardPositive, anchor, lambda,
                  constituents);
}

GeneratedPair gen_hard_negative(std::span<const double> z_i,
                                std::span<const double> y_i,
                                std::span<const double> z_n,
                                std::span<const double> y_n, double lambda,
                                std::size_t anchor,
                                std::pair<std::size_t, std::size_t> constituents) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("gen_hard_negative: lambda out of [0,1]");
  }
  // anchor carries weight (1 - lambda)
  return make_mix(z_i, y_i, z_n, y_n, 1.0 - lambda,
                  GeneratedPair::Kind::HardNegative, anchor, lambda,
                  constituents);
}

PairSets augment_pair_sets(const PairSets& base,
                           const std::vector<GeneratedPair>& generated) {
  PairSets out = base;
  const std::size_t n = base.pool_size;
  out.pool_size = n + generated.size();
  for (std::size_t t = 0; t < generated.size(); ++t) {
    const auto& g = generated[t];
    const std::size_t pool_idx = n + t;
    out.candidates[g.anchor].push_back(pool_idx);
    if (g.kind == GeneratedPair::Kind::HardPositive) {
      out.positives[g.anchor].push_back(pool_idx);
    }
  }
  return out;
}

}  // namespace cft
